"""
Constructive realization

J_N transform, q substitution, the x-sequence feasibility predicate, the
minimal-dimension scan, and assembly and verification of the pattern matrix
X_N together with the similarity matrices P and C.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple

import humanize
import numpy as np
from scipy import linalg, signal

from bhconstruct.constants import (
    Precision,
    Search,
    SignVerdict,
    Tolerance,
    Verification,
)
from bhconstruct.errors import (
    DimensionTooSmall,
    IndeterminateSign,
    LengthMismatch,
    NegativeEntry,
    OverflowAtIndex,
    VerificationFailed,
)
from bhconstruct.utils.poly import (
    HARDWARE,
    MonicRealPoly,
    PowerSumSeq,
    coeffs_from_power_sums,
    coeffs_from_roots,
    power_sums_from_coeffs,
)
from bhconstruct.utils.precision import (
    WorkingPrecision,
    classify_nonnegative,
    classify_sign,
    escalation_ladder,
)
from bhconstruct.utils.spectrum import SpectrumList, direct_power_sums

logger = logging.getLogger(__name__)


# ============================================================================
# Coefficient transforms
# ============================================================================

def _check_dim(f: MonicRealPoly, N: int) -> None:
    n = f.degree
    if N < n:
        raise DimensionTooSmall(N, f"N >= degree {n}")
    if N < 2 and not n == N == 1:
        raise DimensionTooSmall(N, "N >= 2 unless n = N = 1")


def jn_transform(f: MonicRealPoly, N: int,
                 precision: WorkingPrecision = HARDWARE) -> MonicRealPoly:
    """
    J_N(f): g_k = p_k N^(k-1) / ((N-1)(N-2)...(N-k+1))

    The roots of J_N(f) are N times the roots of the q polynomial, so its power
    sums are N^k x_k.
    """
    _check_dim(f, N)
    factor = precision.real(1)
    coeffs = []
    for k, p in enumerate(f.coeffs, start=1):
        if k > 1:
            factor = factor * N / (N - (k - 1))
        coeffs.append(precision.real(p) * factor)
    return MonicRealPoly(tuple(coeffs))


def q_substitution(f: MonicRealPoly, N: int,
                   precision: WorkingPrecision = HARDWARE) -> MonicRealPoly:
    """q_i = p_i / (N (N-1) ... (N-i+1))"""
    _check_dim(f, N)
    falling = precision.real(1)
    coeffs = []
    for i, p in enumerate(f.coeffs, start=1):
        falling = falling * (N - i + 1)
        coeffs.append(precision.real(p) / falling)
    return MonicRealPoly(tuple(coeffs))


def charpoly_from_q(q: MonicRealPoly, N: int,
                    precision: WorkingPrecision = HARDWARE) -> MonicRealPoly:
    """Characteristic polynomial of X_N: Q_i = N!/(N-i)! q_i, padded to degree N"""
    if N < q.degree:
        raise DimensionTooSmall(N, f"N >= degree {q.degree}")
    falling = precision.real(1)
    coeffs = []
    for i in range(1, N + 1):
        falling = falling * (N - i + 1)
        coeffs.append(precision.real(q.coeff(i)) * falling)
    return MonicRealPoly(tuple(coeffs))


def x_sequence(q: MonicRealPoly, N: int,
               precision: WorkingPrecision = HARDWARE) -> PowerSumSeq:
    """x_1..x_N: power sums of the roots of x^(N-n) q(x)"""
    if N < q.degree:
        raise DimensionTooSmall(N, f"N >= degree {q.degree}")
    return power_sums_from_coeffs(q, N, precision)


# ============================================================================
# Feasibility
# ============================================================================

@dataclass(frozen=True)
class FeasibilityReport:
    """Sign verdict on x_1..x_N for one candidate dimension"""
    N: int
    q_coeffs: Tuple[float, ...]
    x_seq: Tuple[float, ...]
    # N^k x_k computed with the Perron root normalized to 1
    scaled_power_sums: Tuple[float, ...]
    feasible: bool
    first_negative_index: Optional[int]
    min_margin: float
    min_margin_index: int
    precision_bits_used: int
    lambda_max: float
    indeterminate: Tuple[int, ...] = ()

    @property
    def verdict(self) -> SignVerdict:
        if self.feasible:
            return SignVerdict.POSITIVE
        if self.first_negative_index is None and self.indeterminate:
            return SignVerdict.AMBIGUOUS
        return SignVerdict.NEGATIVE

    def scale(self, k: int) -> float:
        """A-priori magnitude n (lambda_max / N)^k of x_k"""
        return len(self.q_coeffs) * (self.lambda_max / self.N) ** k


def _scaled_sums(sigma: SpectrumList, N: int, tol_conj: float,
                 precision: WorkingPrecision) -> Tuple:
    normalized = [precision.cplx(z) / sigma.perron for z in sigma.entries]
    f_unit = coeffs_from_roots(normalized, tol_conj, precision)
    return power_sums_from_coeffs(jn_transform(f_unit, N, precision), N, precision).values


def _zero_report(sigma: SpectrumList, N: int) -> FeasibilityReport:
    zeros = (0.0,) * N
    return FeasibilityReport(N, (0.0,) * sigma.n, zeros, zeros, True, None, 0.0, 1,
                             Precision.HARDWARE_BITS, 0.0)


def check_feasible(sigma: SpectrumList, N: int,
                   tol_feas: float = Tolerance.FEAS,
                   tol_conj: float = Tolerance.CONJ,
                   start_bits: int = Precision.HARDWARE_BITS,
                   max_bits: int = Precision.MAX_BITS) -> FeasibilityReport:
    """
    Decide whether X_N built from sigma padded with N - n zeros is nonnegative

    The recurrence runs on y_k = N^k x_k with the Perron root scaled to 1, so
    every intermediate stays near unit magnitude. y_1 passes when
    y_1 >= -tol*n; for k >= 2 values inside (-tol*n, tol*n) trigger a rerun at
    doubled precision, and whatever is still inside at max_bits is reported
    as indeterminate.

    Args:
        sigma: Validated spectrum
        N: Candidate dimension (N >= n)
        tol_feas: Relative sign tolerance at hardware precision
        tol_conj: Conjugate-pairing tolerance
        start_bits: Precision of the first pass
        max_bits: Escalation cap

    Returns:
        FeasibilityReport
    """
    n = sigma.n
    if N < n:
        raise DimensionTooSmall(N, f"N >= n = {n}")
    if sigma.perron == 0.0:
        return _zero_report(sigma, N)

    verdicts: List[SignVerdict] = []
    y: Tuple = ()
    bits_used = start_bits
    for precision in escalation_ladder(start_bits, max_bits):
        bits_used = precision.bits
        try:
            y = _scaled_sums(sigma, N, tol_conj, precision)
        except OverflowAtIndex as e:
            logger.debug(f"N={N}: overflow at index {e.index} with {precision.bits} bits, escalating")
            continue
        verdicts = [classify_nonnegative(y[0], n, tol_feas)]
        verdicts += [classify_sign(v, n, tol_feas, precision) for v in y[1:]]
        if SignVerdict.AMBIGUOUS not in verdicts:
            break
        logger.debug(f"N={N}: {verdicts.count(SignVerdict.AMBIGUOUS)} value(s) in the "
                     f"tolerance band at {precision.bits} bits")
    if not y:
        raise OverflowAtIndex(N)

    ambiguous = tuple(k for k, v in enumerate(verdicts, start=1) if v is SignVerdict.AMBIGUOUS)
    negatives = [k for k, v in enumerate(verdicts, start=1) if v is SignVerdict.NEGATIVE]
    if ambiguous:
        logger.warning(f"N={N}: signs undecided at {bits_used} bits for {len(ambiguous)} index(es)")

    y_float = np.array([float(v) for v in y])
    margins = y_float / n
    lam_max = max(abs(z) for z in sigma.entries)
    with np.errstate(over='ignore', under='ignore', invalid='ignore'):
        x = y_float * np.exp(np.arange(1, N + 1) * math.log(sigma.perron / N))
    q = q_substitution(coeffs_from_roots(sigma.entries, tol_conj), N)

    min_index = int(np.argmin(margins))
    report = FeasibilityReport(
        N=N,
        q_coeffs=q.as_floats(),
        x_seq=tuple(float(v) for v in x),
        scaled_power_sums=tuple(float(v) for v in y_float),
        feasible=not negatives and not ambiguous,
        first_negative_index=negatives[0] if negatives else None,
        min_margin=float(margins[min_index]),
        min_margin_index=min_index + 1,
        precision_bits_used=bits_used,
        lambda_max=lam_max,
        indeterminate=ambiguous,
    )
    logger.debug(f"N={humanize.intcomma(N)}: feasible={report.feasible} "
                 f"min_margin={report.min_margin:.3e} at k={report.min_margin_index}")
    return report


# ============================================================================
# Minimal-dimension scan
# ============================================================================

@dataclass(frozen=True)
class SearchResult:
    """Outcome of scanning N = start..N_max"""
    start: int
    first_feasible: Optional[int]
    bitmap: str  # one symbol per N: 1 feasible, 0 infeasible, ? indeterminate
    min_margin_at_first: Optional[float] = None

    @property
    def stop(self) -> int:
        return self.start + len(self.bitmap) - 1

    def verdict_at(self, N: int) -> str:
        return self.bitmap[N - self.start]

    @property
    def non_monotone(self) -> bool:
        """True if an infeasible N follows a feasible one"""
        first = self.bitmap.find('1')
        return first >= 0 and '0' in self.bitmap[first:]


def search_min_feasible(sigma: SpectrumList, N_max: int,
                        workers: int = Search.WORKERS, **kwargs) -> SearchResult:
    """
    Scan every N from n to N_max and return the first feasible one

    Feasibility is not assumed monotone in N, so the whole range is evaluated
    and returned as a bitmap. With workers > 1 candidates run on a thread pool;
    results are collected in N order.

    Args:
        sigma: Validated spectrum
        N_max: Largest dimension scanned
        workers: Thread count (1 = sequential)
        **kwargs: Passed to check_feasible

    Returns:
        SearchResult
    """
    start = sigma.n
    candidates = list(range(start, N_max + 1))
    if not candidates:
        return SearchResult(start, None, "")

    def evaluate(N: int) -> FeasibilityReport:
        return check_feasible(sigma, N, **kwargs)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(evaluate, candidates))
    else:
        reports = [evaluate(N) for N in candidates]

    bitmap = ''.join(r.verdict.symbol for r in reports)
    first = next((r for r in reports if r.feasible), None)
    logger.info(f"Scanned N={start}..{N_max}: first feasible "
                f"{first.N if first else 'none'} ({bitmap.count('1')} feasible)")
    return SearchResult(start, first.N if first else None, bitmap,
                        first.min_margin if first else None)


# ============================================================================
# Matrices
# ============================================================================

@dataclass(frozen=True)
class PatternMatrix:
    """
    Implicit X_N: entry (i, j) = x_(i-j+1) for j <= i, entry (k, k+1) = k

    Indices are 1-based in the description; arrays are 0-based.
    """
    dim: int
    x: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'x', tuple(float(v) for v in self.x))
        if len(self.x) != self.dim:
            raise LengthMismatch(len(self.x), self.dim)

    @cached_property
    def _dense(self) -> np.ndarray:
        column = np.asarray(self.x, dtype=float)
        matrix = linalg.toeplitz(column, np.zeros(self.dim))
        idx = np.arange(self.dim - 1)
        matrix[idx, idx + 1] = idx + 1
        return matrix

    def dense(self) -> np.ndarray:
        return self._dense.copy()

    def entry(self, i: int, j: int) -> float:
        """1-based entry lookup"""
        if j <= i:
            return self.x[i - j]
        if j == i + 1:
            return float(i)
        return 0.0

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """X v from the pattern; v is a vector or an N x b block of columns"""
        v = np.asarray(v, dtype=float)
        if self.dim == 0:
            return v.copy()
        out = signal.lfilter(np.asarray(self.x), [1.0], v, axis=0)
        ramp = np.arange(1, self.dim, dtype=float).reshape((-1,) + (1,) * (v.ndim - 1))
        out[:-1] += ramp * v[1:]
        return out

    def power_traces(self, K: int, block: int = Verification.TRACE_BLOCK) -> List[float]:
        """trace(X^k) for k = 1..K, pushing blocks of identity columns through matvec"""
        traces = np.zeros(K)
        for start in range(0, self.dim, block):
            cols = np.arange(start, min(start + block, self.dim))
            diag = (cols, np.arange(cols.size))
            V = np.zeros((self.dim, cols.size))
            V[diag] = 1.0
            for k in range(K):
                V = self.matvec(V)
                traces[k] += V[diag].sum()
        return [float(t) for t in traces]

    @property
    def min_entry(self) -> float:
        return min(self.x) if self.dim else 0.0


def build_X(x: PowerSumSeq, N: int, tol_feas: float = Tolerance.FEAS,
            lambda_max: float = 0.0) -> PatternMatrix:
    """
    Assemble X_N from a nonnegative x sequence

    Values in [-tol * n (lambda_max/N)^k, 0) are clamped to 0; anything lower
    raises NegativeEntry. With lambda_max = 0 any negative value is rejected.
    """
    if len(x) != N:
        raise LengthMismatch(len(x), N)
    values = []
    for k, v in enumerate(x.as_floats(), start=1):
        if v < 0:
            scale = x.source_degree * (lambda_max / N) ** k if lambda_max else 0.0
            if v < -tol_feas * scale:
                raise NegativeEntry(k, v)
            v = 0.0
        values.append(v)
    return PatternMatrix(N, tuple(values))


def build_from_report(report: FeasibilityReport, tol_feas: float = Tolerance.FEAS) -> PatternMatrix:
    """X_N for a feasible report"""
    if report.first_negative_index is not None:
        k = report.first_negative_index
        raise NegativeEntry(k, report.x_seq[k - 1])
    if report.indeterminate:
        raise IndeterminateSign(report.indeterminate[0], report.precision_bits_used)
    x = PowerSumSeq(report.x_seq, len(report.q_coeffs))
    return build_X(x, report.N, tol_feas, report.lambda_max)


def _inverse_factorials(dim: int) -> np.ndarray:
    out = np.ones(dim)
    for b in range(1, dim):
        out[b] = out[b - 1] / b
    return out


def build_P(q: MonicRealPoly, dim: int) -> np.ndarray:
    """Lower-triangular P with entry (i, j) = q_(i-j) / (j-1)!, q_0 = 1"""
    if dim < q.degree:
        raise DimensionTooSmall(dim, f"dim >= degree {q.degree}")
    column = np.array([float(q.coeff(k)) for k in range(dim)])
    return linalg.toeplitz(column, np.zeros(dim)) * _inverse_factorials(dim)[None, :]


def build_C(f: MonicRealPoly, N: int) -> np.ndarray:
    """Companion matrix of Q = x^(N-n) f: superdiagonal ones, last row -(Q_N, ..., Q_1)"""
    Q = charpoly_from_q(q_substitution(f, N), N)
    C = np.zeros((N, N))
    idx = np.arange(N - 1)
    C[idx, idx + 1] = 1.0
    C[N - 1, :] = -np.array(Q.as_floats())[::-1]
    return C


# ============================================================================
# Verification
# ============================================================================

@dataclass(frozen=True)
class RealizationCertificate:
    """Residuals showing that X_N carries the padded spectrum"""
    report: Optional[FeasibilityReport]
    matrix_dim: int
    trace_residuals: Tuple[float, ...]
    charpoly_residual: Optional[float] = None
    det_residual: Optional[float] = None

    @property
    def max_trace_residual(self) -> float:
        return max(self.trace_residuals, default=0.0)


def _charpoly_scale(sigma: SpectrumList, N: int) -> np.ndarray:
    """|e_i| of the moduli, bounding |Q_i| (i = 1..N)"""
    elementary = np.poly(-np.abs(np.asarray(sigma.entries)))[1:]
    scale = np.zeros(N)
    scale[:len(elementary)] = np.abs(elementary)
    return np.maximum(1.0, scale)


def verify(sigma: SpectrumList, X: PatternMatrix,
           K_verify: int = Verification.K_VERIFY,
           trace_tol: float = Verification.TRACE_TOL,
           charpoly_max_dim: int = Verification.CHARPOLY_MAX_DIM,
           charpoly_tol: float = Verification.CHARPOLY_TOL,
           det_max_dim: int = Verification.DET_MAX_DIM,
           det_tol: float = Verification.DET_TOL,
           report: Optional[FeasibilityReport] = None) -> RealizationCertificate:
    """
    Check that X carries sigma plus N - n zeros

    Compares trace(X^k) with s_k for k = 1..K_verify. For N <= charpoly_max_dim
    the characteristic polynomial is rebuilt from the traces and compared with
    x^(N-n) f; for N <= det_max_dim det(X) is compared with (-1)^N N! q_N.

    Raises:
        DimensionTooSmall: N < n
        VerificationFailed: first residual above its tolerance
    """
    N = X.dim
    n = sigma.n
    if N < n:
        raise DimensionTooSmall(N, f"N >= n = {n}")
    with_charpoly = N <= charpoly_max_dim
    K_total = max(K_verify, N) if with_charpoly else K_verify

    traces = X.power_traces(K_total)
    sums = direct_power_sums(sigma, K_total)
    moduli = np.abs(np.asarray(sigma.entries))

    residuals = []
    for k in range(1, K_verify + 1):
        residual = abs(traces[k - 1] - sums[k - 1])
        if residual > trace_tol * max(1.0, float(np.sum(moduli ** k))):
            raise VerificationFailed(f"trace(X^{k})", residual)
        residuals.append(residual)

    charpoly_residual = None
    if with_charpoly:
        rebuilt = coeffs_from_power_sums(PowerSumSeq(tuple(traces[:N]), N), N)
        f = coeffs_from_roots(sigma.entries)
        expected = np.array(f.padded(N).as_floats())
        diff = np.abs(np.array(rebuilt.as_floats()) - expected) / _charpoly_scale(sigma, N)
        charpoly_residual = float(np.max(diff))
        if charpoly_residual > charpoly_tol:
            raise VerificationFailed("characteristic polynomial", charpoly_residual)

    det_residual = None
    if N <= det_max_dim:
        dense = X.dense()
        f = coeffs_from_roots(sigma.entries)
        q = q_substitution(f, N)
        expected_det = (-1) ** N * math.factorial(N) * float(q.coeff(N))
        hadamard = float(np.prod(np.linalg.norm(dense, axis=1)))
        det_residual = abs(float(np.linalg.det(dense)) - expected_det) / max(1.0, hadamard)
        if det_residual > det_tol:
            raise VerificationFailed("determinant", det_residual)

    certificate = RealizationCertificate(report, N, tuple(residuals), charpoly_residual, det_residual)
    logger.info(f"Verified X_{N}: max trace residual {certificate.max_trace_residual:.3e}")
    return certificate


def certify(sigma: SpectrumList, N: int, tol_feas: float = Tolerance.FEAS,
            verify_kwargs: Optional[dict] = None, **kwargs) -> Tuple[PatternMatrix, RealizationCertificate]:
    """check_feasible, build X_N and verify it in one step"""
    report = check_feasible(sigma, N, tol_feas=tol_feas, **kwargs)
    X = build_from_report(report, tol_feas)
    certificate = verify(sigma, X, report=report, **(verify_kwargs or {}))
    return X, certificate


