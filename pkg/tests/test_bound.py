"""
Unit tests for the explicit padding bound
"""

import math

import pytest

from bhconstruct.errors import (
    DimensionTooSmall,
    HypothesesNotSatisfied,
    StrictDominanceRequired,
)
from bhconstruct.utils.bound import (
    closed_form_log10,
    compute_constants,
    delta,
    drift_bound,
    proof_ell,
    ratio_gap,
    tail_lower_bound,
)
from bhconstruct.utils.poly import coeffs_from_roots
from bhconstruct.utils.realize import check_feasible
from bhconstruct.utils.spectrum import check_hypotheses, validate

from tests.conftest import disk_entries


def constants_for(entries, **kwargs):
    sigma = validate(entries)
    return sigma, compute_constants(sigma, coeffs_from_roots(sigma.entries), **kwargs)


class TestComputeConstants:
    """Test compute_constants()"""

    def test_large_gap_pair(self):
        """Test (1, -0.01), whose bound is small enough to state exactly"""
        _, c = constants_for([1, -0.01])
        assert c.gamma == pytest.approx(2.0)
        assert c.R == pytest.approx(0.2475)
        assert c.r == pytest.approx(0.2475)
        assert c.N0 == 1
        assert c.M == 1.0
        assert c.delta == pytest.approx(0.12375)
        assert not c.saturated
        assert 44000 < c.N_bound < 45000
        assert c.log10_N_bound == pytest.approx(math.log10(c.N_bound), abs=1e-4)

    def test_reference_spectrum_saturates(self):
        """Test the constants of (1.1, e^{+-i pi/10})"""
        _, c = constants_for(disk_entries())
        assert c.gamma == pytest.approx(6.004226, rel=1e-6)
        assert c.ell == pytest.approx(4.3 / 4.1)
        assert c.N0 == 30
        assert c.M == pytest.approx(0.455834, rel=1e-5)
        assert 1e-6 < c.delta < 1e-5
        assert c.saturated
        assert c.N_bound is None
        assert c.log10_N_bound == pytest.approx(21.68, abs=0.05)
        assert c.describe_bound().startswith("10^")

    def test_describe_small_bound(self):
        """Test digit grouping of an exact bound"""
        _, c = constants_for([1, -0.01])
        assert "," in c.describe_bound()

    def test_saturation_threshold_is_configurable(self):
        """Test that a low threshold turns an exact bound into a logarithm"""
        _, c = constants_for([1, -0.01], saturation_log10=3.0)
        assert c.saturated and c.N_bound is None

    def test_single_entry_rejected(self):
        """Test n = 1"""
        with pytest.raises(DimensionTooSmall):
            constants_for([2])

    def test_equal_moduli_rejected(self):
        """Test lambda_1 = lambda_0"""
        with pytest.raises(StrictDominanceRequired):
            constants_for([1, -1])

    def test_failed_hypotheses_rejected(self):
        """Test rho = 1.05"""
        with pytest.raises(HypothesesNotSatisfied):
            constants_for(disk_entries(rho=1.05))


class TestDerivedQuantities:
    """Test delta, the closed form and the auxiliary estimates"""

    def test_delta_recomputed(self):
        """Test delta() against the stored value"""
        sigma, c = constants_for(disk_entries())
        assert delta(sigma, c) == pytest.approx(c.delta, rel=1e-12)

    @pytest.mark.parametrize("entries", [[1, -0.01], [1, 0.2, -0.3], disk_entries()])
    def test_closed_form_matches_log_space_bound(self, entries):
        """Test the bound rewritten through delta"""
        _, c = constants_for(entries)
        assert closed_form_log10(c) == pytest.approx(c.log10_N_bound, abs=1e-9)

    def test_proof_ell_is_reciprocal(self):
        """Test (lambda_0 + R)/(lambda_1 - R) = 1/ell"""
        _, c = constants_for(disk_entries())
        assert proof_ell(c) == pytest.approx(1 / c.ell)

    def test_both_N0_forms_agree(self, rng, random_dominant_spectrum):
        """Test ceil(ln(2n-2)/ln(ell)) against the reciprocal form on random spectra"""
        checked = 0
        for _ in range(300):
            n = int(rng.integers(2, 6))
            sigma = validate(random_dominant_spectrum(n, float(rng.uniform(0.5, 3.0)), 0.3))
            if not check_hypotheses(sigma).ok:
                continue
            c = compute_constants(sigma, coeffs_from_roots(sigma.entries))
            reciprocal = math.ceil(math.log(2 * (n - 1)) / math.log(1 / proof_ell(c)))
            assert c.N0 == max(1, reciprocal)
            checked += 1
        assert checked > 100

    def test_ratio_gap_value(self):
        """Test N^2/((N-1)(N-2)) - 1 at N = 1000"""
        assert ratio_gap(1000, 3) == pytest.approx(1e6 / (999 * 998) - 1, rel=1e-12)
        assert ratio_gap(50, 1) == 0.0

    @pytest.mark.parametrize("n,N", [(2, 5), (3, 10), (4, 100), (6, 1000)])
    def test_ratio_gap_bound(self, n, N):
        """Test ratio_gap <= 2 n^2 / N for N > n^2 and k <= n"""
        for k in range(1, n + 1):
            assert ratio_gap(N, k) <= 2 * n * n / N

    def test_ratio_gap_domain(self):
        """Test N <= k"""
        with pytest.raises(DimensionTooSmall):
            ratio_gap(3, 3)

    @pytest.mark.parametrize("entries", [[1, -0.01], [1, 0.2, -0.3], disk_entries()])
    def test_tail_bound_beyond_N0(self, entries):
        """Test that the tail estimate exceeds half of (lambda_1 - r)^k for k >= N0"""
        sigma, c = constants_for(entries)
        for k in range(c.N0, c.N0 + 10):
            assert tail_lower_bound(sigma, c, k) > 0.5 * (c.lambda1 - c.r) ** k * (1 - 1e-12)

    @pytest.mark.parametrize("entries", [[1, -0.01], [1, 0.2, -0.3], disk_entries()])
    def test_drift_bound_below_margin(self, entries):
        """Test that the drift stays within M r for k <= N0"""
        sigma, c = constants_for(entries)
        for k in range(1, c.N0 + 1):
            assert drift_bound(c, sigma.n, k) <= c.M * c.r * (1 + 1e-12)


class TestBoundGuarantee:
    """Test that the bound dimension is always feasible"""

    def test_random_large_gap_pairs(self, rng):
        """Test 50 random pairs (1, c) with |c| <= 0.19"""
        for _ in range(50):
            c = float(rng.uniform(-0.19, 0.19))
            sigma, constants = constants_for([1.0, c])
            assert constants.N_bound is not None and constants.N_bound <= 10 ** 6
            assert check_feasible(sigma, constants.N_bound).feasible
