"""
Explicit padding bound

Computes the constant set that guarantees realizability after padding with
zeros, the root-displacement budget delta, and the auxiliary estimates used
to justify it. All constants are evaluated in software floating point and the
final bound is carried in log space, so astronomically large values are
reported as a base-10 logarithm instead of overflowing.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import humanize

from bhconstruct.constants import BoundLimits, Precision, Tolerance
from bhconstruct.errors import (
    DimensionTooSmall,
    HypothesesNotSatisfied,
    StrictDominanceRequired,
)
from bhconstruct.utils.poly import MonicRealPoly
from bhconstruct.utils.precision import WorkingPrecision
from bhconstruct.utils.spectrum import (
    HypothesisReport,
    SpectrumList,
    check_hypotheses,
    direct_power_sums,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundConstants:
    """Constants of the padding bound for one spectrum"""
    n: int
    lambda1: float
    gamma: float
    lambda0: float
    R: float
    ell: float
    r: float
    m: float
    N0: int
    M: float
    delta: float
    log10_N_bound: float
    N_bound: Optional[int]  # None when saturated
    saturated: bool

    def describe_bound(self) -> str:
        if self.saturated:
            return f"10^{self.log10_N_bound:.3f}"
        return humanize.intcomma(self.N_bound)


def _hypothesis_detail(report: HypothesisReport) -> str:
    if report.indeterminate:
        return f"power-sum signs undecided at indices {list(report.indeterminate)}"
    if report.first_negative_index is None and report.unchecked_from is not None:
        return f"power sums from index {report.unchecked_from} were not checked"
    return (f"s_{report.first_negative_index} = "
            f"{report.power_sums[report.first_negative_index - 1]:.6g} fails the sign policy")


def compute_constants(sigma: SpectrumList, f: MonicRealPoly,
                      hypotheses: Optional[HypothesisReport] = None,
                      saturation_log10: float = BoundLimits.SATURATION_LOG10,
                      tol_sign: float = Tolerance.SIGN) -> BoundConstants:
    """
    Evaluate every constant of the padding bound

    Args:
        sigma: Validated spectrum with n >= 2
        f: Monic polynomial with roots sigma
        hypotheses: Previously computed hypothesis report (recomputed if None)
        saturation_log10: Above this log10 the bound is reported only as a logarithm
        tol_sign: Sign tolerance for the hypothesis recheck

    Returns:
        BoundConstants

    Raises:
        DimensionTooSmall: n = 1 (realization is immediate at N = 1)
        StrictDominanceRequired: lambda_1 <= lambda_0
        HypothesesNotSatisfied: the power-sum hypotheses fail
    """
    n = sigma.n
    if n < 2:
        raise DimensionTooSmall(n, "spectrum length >= 2 for the padding bound")
    if sigma.perron <= sigma.lambda0:
        raise StrictDominanceRequired(sigma.perron, sigma.lambda0)
    if hypotheses is None:
        hypotheses = check_hypotheses(sigma, tol_sign)
    if not hypotheses.perron_ok:
        raise StrictDominanceRequired(sigma.perron, sigma.lambda0)
    if not hypotheses.ok:
        raise HypothesesNotSatisfied(_hypothesis_detail(hypotheses))

    precision = WorkingPrecision(Precision.CONSTANTS_BITS)
    ctx = precision.ctx
    lam1 = ctx.mpf(sigma.perron)
    lam0 = ctx.mpf(sigma.lambda0)

    gamma = 2 * max([ctx.mpf(1)] + [abs(ctx.mpf(p)) ** (ctx.mpf(1) / k)
                                    for k, p in enumerate(f.coeffs, start=1)])
    R = (lam1 - lam0) / 4
    ell = (3 * lam1 + lam0) / (lam1 + 3 * lam0)
    r = min(R, ctx.mpf(1))
    m = max(ctx.mpf(1), lam1)
    N0 = int(ctx.ceil(ctx.ln(2 * n - 2) / ctx.ln(ell)))
    N0 = max(N0, 1)

    M = ctx.mpf(1)
    if N0 >= 2:
        sums = direct_power_sums(sigma, N0, precision)
        M = min([M] + list(sums[1:N0]))

    growth = (m + r) ** (N0 - 1)
    delta = M * r / (n * N0 * growth)
    ln_bound = ctx.ln(2) + n * ctx.ln(16 * gamma * n * N0 * growth / (ctx.sqrt(3) * M * r))
    log10_bound = float(ln_bound / ctx.ln(10))

    saturated = log10_bound > saturation_log10
    N_bound = None if saturated else max(n, int(ctx.ceil(ctx.exp(ln_bound))))

    constants = BoundConstants(
        n=n,
        lambda1=float(lam1),
        gamma=float(gamma),
        lambda0=float(lam0),
        R=float(R),
        ell=float(ell),
        r=float(r),
        m=float(m),
        N0=N0,
        M=float(M),
        delta=float(delta),
        log10_N_bound=log10_bound,
        N_bound=N_bound,
        saturated=saturated,
    )
    if saturated:
        logger.warning(f"Padding bound saturates: N >= {constants.describe_bound()}")
    else:
        logger.info(f"Padding bound N = {constants.describe_bound()} (N0={N0}, delta={constants.delta:.6g})")
    return constants


def delta(sigma: SpectrumList, constants: BoundConstants) -> float:
    """Root-displacement budget M r / (n N0 (m + r)^(N0 - 1))"""
    ctx = WorkingPrecision(Precision.CONSTANTS_BITS).ctx
    growth = (ctx.mpf(constants.m) + constants.r) ** (constants.N0 - 1)
    return float(ctx.mpf(constants.M) * constants.r / (sigma.n * constants.N0 * growth))


def closed_form_log10(constants: BoundConstants) -> float:
    """log10 of 2^(4n+1) gamma^n / (3^(n/2) delta^n), the bound rewritten through delta"""
    ctx = WorkingPrecision(Precision.CONSTANTS_BITS).ctx
    n = constants.n
    value = ((4 * n + 1) * ctx.log10(2) + n * ctx.log10(constants.gamma)
             - ctx.mpf(n) / 2 * ctx.log10(3) - n * ctx.log10(constants.delta))
    return float(value)


def proof_ell(constants: BoundConstants) -> float:
    """(lambda_0 + R) / (lambda_1 - R), the reciprocal form of ell"""
    return (constants.lambda0 + constants.R) / (constants.lambda1 - constants.R)


def ratio_gap(N: int, k: int) -> float:
    """
    N^(k-1) / ((N-1)(N-2)...(N-k+1)) - 1, evaluated in log space

    Bounded by 2n^2/N whenever N > n^2 and k <= n.
    """
    if not N > k >= 1:
        raise DimensionTooSmall(N, f"N > k >= 1 with k = {k}")
    ctx = WorkingPrecision(Precision.CONSTANTS_BITS).ctx
    total = ctx.fsum(ctx.log1p(-ctx.mpf(j) / N) for j in range(1, k))
    return float(ctx.expm1(-total))


def tail_lower_bound(sigma: SpectrumList, constants: BoundConstants, k: int) -> float:
    """
    (lambda_1 - r)^k - (n - 1)(lambda_0 + r)^k

    Lower bound on the k-th power sum of any root set within r of sigma;
    exceeds half of (lambda_1 - r)^k once k >= N0.
    """
    ctx = WorkingPrecision(Precision.CONSTANTS_BITS).ctx
    lam1 = ctx.mpf(constants.lambda1)
    lam0 = ctx.mpf(constants.lambda0)
    r = ctx.mpf(constants.r)
    return float((lam1 - r) ** k - (sigma.n - 1) * (lam0 + r) ** k)


def drift_bound(constants: BoundConstants, n: int, k: int) -> float:
    """delta k (lambda_1 + r)^(k-1) n, the largest change of s_k under a displacement below delta"""
    ctx = WorkingPrecision(Precision.CONSTANTS_BITS).ctx
    return float(ctx.mpf(constants.delta) * k * (ctx.mpf(constants.lambda1) + constants.r) ** (k - 1) * n)
