"""
Candidate spectra: validation, Perron dominance and power-sum hypotheses
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import humanize
import numpy as np

from bhconstruct.constants import ErrorMessage, Precision, Search, SignVerdict, Tolerance
from bhconstruct.errors import InputError, NoPerronElement, StrictDominanceRequired
from bhconstruct.utils.poly import pair_conjugates
from bhconstruct.utils.precision import (
    Scalar,
    WorkingPrecision,
    classify_nonnegative,
    classify_sign,
    escalation_ladder,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumList:
    """Validated list with the Perron element in front"""
    entries: Tuple[complex, ...]
    perron_index: int = 0
    # Position of each entry in the caller's original list
    source_index: Tuple[int, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def perron(self) -> float:
        """lambda_1"""
        return self.entries[self.perron_index].real

    @property
    def others(self) -> Tuple[complex, ...]:
        return tuple(z for i, z in enumerate(self.entries) if i != self.perron_index)

    @property
    def lambda0(self) -> float:
        """Largest modulus among the non-Perron entries (0 when n = 1)"""
        return max((abs(z) for z in self.others), default=0.0)

    @property
    def gap(self) -> float:
        """Spectral gap lambda_1 - lambda_0"""
        return self.perron - self.lambda0

    @property
    def is_real(self) -> bool:
        return all(z.imag == 0.0 for z in self.entries)

    def scaled(self, c: float) -> "SpectrumList":
        """c times every entry (c > 0 keeps the Perron element in front)"""
        return SpectrumList(tuple(c * z for z in self.entries), self.perron_index, self.source_index)

    def __str__(self) -> str:
        parts = []
        for z in self.entries:
            if z.imag == 0.0:
                parts.append(f"{z.real:.10g}")
            else:
                parts.append(f"{z.real:.10g}{z.imag:+.10g}i")
        return '(' + ', '.join(parts) + ')'


@dataclass(frozen=True)
class JLLViolation:
    """A pair (k, m) with n^(k-1) s_km < s_m^k beyond tolerance"""
    k: int
    m: int
    slack: float  # n^(k-1) s_km - s_m^k


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the dominance and power-sum checks for one spectrum"""
    perron_ok: bool
    perron_gap: float
    s1: float
    cutoff_K: int
    power_sums: Tuple[float, ...]
    min_power_sum: float
    min_power_sum_index: int
    power_sums_ok: bool
    jll_violations: Tuple[JLLViolation, ...]
    suleimanova: bool
    first_negative_index: Optional[int] = None
    indeterminate: Tuple[int, ...] = ()
    precision_bits_used: int = Precision.HARDWARE_BITS
    # First power-sum index past the horizon when K* was not reached
    unchecked_from: Optional[int] = None

    @property
    def ok(self) -> bool:
        """Both hypotheses certified"""
        return self.perron_ok and self.power_sums_ok and not self.undecided

    @property
    def undecided(self) -> bool:
        """Some sign in 2..K* is neither certified nor refuted"""
        return bool(self.indeterminate) or self.unchecked_from is not None



# ============================================================================
# Validation
# ============================================================================

def validate(entries: Union[Sequence[complex], SpectrumList],
             tol_conj: float = Tolerance.CONJ) -> SpectrumList:
    """
    Validate a candidate spectrum and move its Perron element to the front

    Args:
        entries: The list lambda_1..lambda_n in any order
        tol_conj: Conjugate-pairing tolerance relative to the largest modulus

    Returns:
        SpectrumList with perron_index 0

    Raises:
        InputError: empty list or non-finite entry
        ConjugateClosureViolation: a non-real entry has no partner
        NoPerronElement: the maximum modulus is not attained by a real
            nonnegative entry
    """
    if isinstance(entries, SpectrumList):
        entries = entries.entries
    values = [complex(z) for z in entries]
    if not values:
        raise InputError(ErrorMessage.EMPTY_SPECTRUM)
    for z in values:
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise InputError(ErrorMessage.NOT_FINITE.format(value=z))

    pair_conjugates(values, tol_conj, WorkingPrecision())

    modulus = max(abs(z) for z in values)
    slack = tol_conj * modulus
    perron = None
    for i, z in enumerate(values):
        if abs(z.imag) <= slack and z.real >= 0 and z.real >= modulus - slack:
            perron = i
            break
    if perron is None:
        raise NoPerronElement(modulus)

    # Entries paired as real are stored exactly real
    values = [complex(z.real, 0.0) if abs(z.imag) <= slack else z for z in values]
    order = [perron] + [i for i in range(len(values)) if i != perron]
    ordered = [values[i] for i in order]
    logger.debug(f"Validated spectrum of length {len(values)}: Perron root {ordered[0].real}")
    return SpectrumList(tuple(ordered), 0, tuple(order))


def is_suleimanova(sigma: SpectrumList, tol: float = Tolerance.SIGN) -> bool:
    """Real list with exactly one positive entry and s_1 >= 0"""
    if not sigma.is_real:
        return False
    positives = sum(1 for z in sigma.entries if z.real > 0)
    s1 = sum(z.real for z in sigma.entries)
    return positives == 1 and classify_nonnegative(s1, max(1.0, sigma.perron), tol) is SignVerdict.POSITIVE


# ============================================================================
# Power sums
# ============================================================================

def direct_power_sums(sigma: SpectrumList, K: int,
                      precision: WorkingPrecision = WorkingPrecision()) -> Tuple[Scalar, ...]:
    """s_1..s_K by direct summation of powers (non-finite values become inf)"""
    if precision.is_hardware:
        z = np.asarray(sigma.entries, dtype=complex)
        totals = np.empty(K)
        base = np.ones_like(z)
        with np.errstate(over='ignore', invalid='ignore'):
            for start in range(0, K, Search.POWER_SUM_CHUNK):
                size = min(Search.POWER_SUM_CHUNK, K - start)
                powers = base * np.cumprod(np.tile(z, (size, 1)), axis=0)
                totals[start:start + size] = powers.sum(axis=1).real
                base = powers[-1]
        totals[~np.isfinite(totals)] = np.inf
        return tuple(float(s) for s in totals)

    zs = [precision.cplx(z) for z in sigma.entries]
    current = list(zs)
    sums: List[Scalar] = []
    for _ in range(K):
        sums.append(precision.real(sum(current).real))
        current = [c * z for c, z in zip(current, zs)]
    return tuple(sums)


def _require_dominance(sigma: SpectrumList) -> None:
    if sigma.perron <= 0 or sigma.perron <= sigma.lambda0:
        raise StrictDominanceRequired(sigma.perron, sigma.lambda0)


def power_sum_cutoff(sigma: SpectrumList) -> int:
    """
    Index K* beyond which every power sum is provably positive

    From s_k >= lambda_1^k - (n-1) lambda_0^k, any k above
    ln(n-1) / ln(lambda_1/lambda_0) gives s_k > 0; one extra index keeps the
    boundary case strict.
    """
    _require_dominance(sigma)
    if sigma.n == 1 or sigma.lambda0 == 0.0:
        return 2
    ratio = math.log(sigma.perron / sigma.lambda0)
    return max(2, math.ceil(math.log(sigma.n - 1) / ratio) + 1)


def jll_check(sigma: SpectrumList, k_max: int = Search.JLL_K_MAX,
              m_max: int = Search.JLL_M_MAX,
              tol: float = Tolerance.SIGN,
              dim: Optional[int] = None) -> List[JLLViolation]:
    """
    Pairs (k, m) violating n^(k-1) s_km >= s_m^k

    n is the list length unless dim gives the padded dimension; the
    inequality is necessary for a dim x dim realization. Only pairs with km
    within the power-sum horizon are examined; the horizon stops at the first
    power sum that leaves the double range.
    """
    n = dim if dim is not None else sigma.n
    sums = direct_power_sums(sigma, min(k_max * m_max, Search.JLL_HORIZON))
    horizon = next((k for k, s in enumerate(sums) if not math.isfinite(s)), len(sums))
    violations: List[JLLViolation] = []
    with np.errstate(over='ignore', invalid='ignore'):
        for k in range(1, k_max + 1):
            for m in range(1, m_max + 1):
                if k * m > horizon:
                    continue
                s_m = np.float64(sums[m - 1])
                lhs = np.float64(n) ** (k - 1) * np.float64(sums[k * m - 1])
                rhs = s_m ** k
                margin = tol * abs(s_m) ** k
                if not (np.isfinite(lhs) and np.isfinite(rhs)):
                    continue
                if lhs < rhs - margin:
                    violations.append(JLLViolation(k, m, float(lhs - rhs)))
    if violations:
        logger.info(f"JLL check found {len(violations)} violation(s)")
    return violations


def check_hypotheses(sigma: SpectrumList,
                     tol_sign: float = Tolerance.SIGN,
                     start_bits: int = Precision.HARDWARE_BITS,
                     max_bits: int = Precision.MAX_BITS,
                     horizon: int = Search.POWER_SUM_HORIZON) -> HypothesisReport:
    """
    Check strict Perron dominance and power-sum positivity

    s_1 >= -tol*max(1, lambda_1) is required, and s_m > tol*max(1, lambda_1^m)
    for 2 <= m <= K*. Values inside the band are recomputed at doubled
    precision; those still inside at max_bits are reported as indeterminate.
    When dominance fails the sums are still reported up to max(2, n).
    Indices past the horizon are left unchecked and keep the report
    undecided.

    Args:
        sigma: Validated spectrum
        tol_sign: Relative sign tolerance at hardware precision
        start_bits: Precision of the first pass
        max_bits: Escalation cap
        horizon: Largest power-sum index examined

    Returns:
        HypothesisReport carrying every failure (never raises on failure)
    """
    lam1 = sigma.perron
    gap = sigma.gap
    perron_ok = lam1 > 0 and gap > tol_sign * lam1
    cutoff = power_sum_cutoff(sigma) if perron_ok else max(2, sigma.n)
    checked = min(cutoff, max(2, horizon))
    unchecked_from = checked + 1 if checked < cutoff else None
    if unchecked_from is not None:
        logger.warning(f"K*={humanize.intcomma(cutoff)} exceeds the power-sum horizon; "
                       f"indices from {humanize.intcomma(unchecked_from)} are not checked")

    pending = list(range(2, checked + 1))
    verdicts = {}
    sums: List[Scalar] = []
    bits_used = start_bits
    for precision in escalation_ladder(start_bits, max_bits):
        computed = direct_power_sums(sigma, max(pending) if sums else checked, precision)
        if not sums:
            sums = list(computed)
        bits_used = precision.bits
        if precision.is_hardware:
            base = np.float64(max(1.0, lam1))
        else:
            base = precision.real(max(1.0, lam1))
        still = []
        with np.errstate(over='ignore'):
            for m in pending:
                value = computed[m - 1]
                if precision.isfinite(value):
                    verdict = classify_sign(value, base ** m, tol_sign, precision)
                else:
                    verdict = SignVerdict.AMBIGUOUS
                verdicts[m] = verdict
                if verdict is SignVerdict.AMBIGUOUS:
                    still.append(m)
                else:
                    sums[m - 1] = value
        pending = still
        if not pending:
            break
        logger.debug(f"Power sums {pending} inside the tolerance band at {precision.bits} bits")

    if pending:
        logger.warning(f"Power-sum signs undecided at {bits_used} bits for indices {pending}")

    s1 = float(sums[0])
    s1_ok = classify_nonnegative(s1, max(1.0, lam1), tol_sign) is SignVerdict.POSITIVE
    negatives = [m for m in range(2, checked + 1) if verdicts[m] is SignVerdict.NEGATIVE]
    if not s1_ok:
        negatives.insert(0, 1)
    rest_ok = all(verdicts[m] is SignVerdict.POSITIVE for m in range(2, checked + 1))
    floats = tuple(float(s) for s in sums)
    min_index = min(range(len(floats)), key=lambda i: floats[i])

    report = HypothesisReport(
        perron_ok=perron_ok,
        perron_gap=gap,
        s1=s1,
        cutoff_K=cutoff,
        power_sums=floats,
        min_power_sum=floats[min_index],
        min_power_sum_index=min_index + 1,
        power_sums_ok=s1_ok and rest_ok and unchecked_from is None,
        jll_violations=tuple(jll_check(sigma, tol=tol_sign)),
        suleimanova=is_suleimanova(sigma, tol_sign),
        first_negative_index=negatives[0] if negatives else None,
        indeterminate=tuple(pending),
        precision_bits_used=bits_used,
        unchecked_from=unchecked_from,
    )
    logger.info(
        f"Hypotheses for n={sigma.n}: perron_ok={report.perron_ok}, "
        f"power_sums_ok={report.power_sums_ok}, K*={cutoff}"
    )
    return report
