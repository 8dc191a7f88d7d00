"""
Real-coefficient monic polynomial kernel

Root/coefficient conversion, the Newton identities in both directions, and a
simultaneous-iteration root finder. Complex values are plain Python
``complex`` at hardware precision and ``mpc`` under a software precision.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import mpmath
import numpy as np
from scipy import signal

from bhconstruct.constants import ErrorMessage, RootFinder, Tolerance
from bhconstruct.errors import (
    ConjugateClosureViolation,
    InputError,
    LengthMismatch,
    NoConvergence,
    OverflowAtIndex,
)
from bhconstruct.utils.precision import ComplexScalar, Scalar, WorkingPrecision

logger = logging.getLogger(__name__)

HARDWARE = WorkingPrecision()


def _is_finite(value) -> bool:
    if isinstance(value, (int, float, complex)):
        return cmath.isfinite(complex(value))
    return bool(mpmath.isfinite(value))


@dataclass(frozen=True)
class MonicRealPoly:
    """x^n + p_1 x^(n-1) + ... + p_n, stored as (p_1, ..., p_n)"""
    coeffs: Tuple[Scalar, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'coeffs', tuple(self.coeffs))
        if not self.coeffs:
            raise InputError(ErrorMessage.BAD_CONFIG.format(detail="polynomial degree must be >= 1"))
        for value in self.coeffs:
            if not _is_finite(value):
                raise InputError(ErrorMessage.NOT_FINITE.format(value=value))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def coeff(self, k: int) -> Scalar:
        """p_k with p_0 = 1 and p_k = 0 beyond the degree"""
        if k == 0:
            return 1.0
        if 1 <= k <= self.degree:
            return self.coeffs[k - 1]
        return 0.0

    def as_floats(self) -> Tuple[float, ...]:
        return tuple(float(c) for c in self.coeffs)

    def scaled(self, c: Scalar) -> "MonicRealPoly":
        """Polynomial whose roots are c times the roots of this one"""
        return MonicRealPoly(tuple(p * c ** k for k, p in enumerate(self.coeffs, start=1)))

    def padded(self, dim: int) -> "MonicRealPoly":
        """x^(dim-n) times this polynomial"""
        if dim < self.degree:
            raise LengthMismatch(dim, self.degree)
        return MonicRealPoly(self.coeffs + (0.0,) * (dim - self.degree))

    def __str__(self) -> str:
        terms = [f"x^{self.degree}"]
        for k, p in enumerate(self.coeffs, start=1):
            power = self.degree - k
            value = float(p)
            if value == 0.0:
                continue
            sign = '-' if value < 0 else '+'
            mono = '' if power == 0 else ('x' if power == 1 else f'x^{power}')
            mag = f"{abs(value):.6g}"
            terms.append(f"{sign} {mag}{'*' + mono if mono else ''}")
        return ' '.join(terms)


@dataclass(frozen=True)
class PowerSumSeq:
    """Power sums (t_1, ..., t_K) of the roots of a degree-n polynomial"""
    values: Tuple[Scalar, ...]
    source_degree: int

    def __post_init__(self) -> None:
        object.__setattr__(self, 'values', tuple(self.values))
        if not self.values:
            raise InputError(ErrorMessage.BAD_CONFIG.format(detail="power-sum sequence is empty"))

    def __len__(self) -> int:
        return len(self.values)

    def at(self, k: int) -> Scalar:
        """t_k, 1-indexed"""
        return self.values[k - 1]

    def as_floats(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.values)


# ============================================================================
# Roots -> coefficients
# ============================================================================

def pair_conjugates(roots: Sequence[ComplexScalar], tol_conj: float,
                    precision: WorkingPrecision) -> Tuple[List[Scalar], List[ComplexScalar]]:
    """Split roots into reals and one representative per conjugate pair"""
    scale = max(precision.abs(z) for z in roots)
    threshold = tol_conj * scale
    reals: List[Scalar] = []
    pending: List[ComplexScalar] = []
    for z in roots:
        z = precision.cplx(z)
        if abs(z.imag) <= threshold:
            reals.append(precision.real(z.real))
        else:
            pending.append(z)

    upper = [z for z in pending if z.imag > 0]
    lower = [z for z in pending if z.imag < 0]
    pairs: List[ComplexScalar] = []
    used = [False] * len(lower)
    for z in upper:
        best, best_dist = None, None
        for j, w in enumerate(lower):
            if used[j]:
                continue
            dist = abs(w - z.conjugate())
            if dist <= threshold and (best_dist is None or dist < best_dist):
                best, best_dist = j, dist
        if best is None:
            raise ConjugateClosureViolation(complex(z))
        used[best] = True
        pairs.append((z + lower[best].conjugate()) / 2)
    for j, w in enumerate(lower):
        if not used[j]:
            raise ConjugateClosureViolation(complex(w))
    return reals, pairs


def _multiply(a: List[Scalar], b: List[Scalar], precision: WorkingPrecision) -> List[Scalar]:
    if precision.is_hardware:
        return list(np.convolve(np.asarray(a, dtype=float), np.asarray(b, dtype=float)))
    out = [precision.real(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def coeffs_from_roots(roots: Sequence[ComplexScalar],
                      tol_conj: float = Tolerance.CONJ,
                      precision: WorkingPrecision = HARDWARE) -> MonicRealPoly:
    """
    Expand prod (x - root) into a monic polynomial with exactly real coefficients

    Conjugate pairs are merged into real quadratic factors, so no imaginary
    residue reaches the coefficients.

    Args:
        roots: Conjugate-closed multiset of roots
        tol_conj: Pairing tolerance relative to the largest root modulus
        precision: Working precision of the expansion

    Returns:
        The monic polynomial with the given roots
    """
    if not roots:
        raise InputError(ErrorMessage.EMPTY_SPECTRUM)
    reals, pairs = pair_conjugates(roots, tol_conj, precision)
    one = precision.real(1)
    product: List[Scalar] = [one]
    for x in reals:
        product = _multiply(product, [one, -x], precision)
    for z in pairs:
        quadratic = [one, precision.real(-2 * z.real), precision.real(z.real ** 2 + z.imag ** 2)]
        product = _multiply(product, quadratic, precision)
    return MonicRealPoly(tuple(precision.real(c) for c in product[1:]))


# ============================================================================
# Newton identities
# ============================================================================

def power_sums_from_coeffs(p: MonicRealPoly, K: int,
                           precision: WorkingPrecision = HARDWARE) -> PowerSumSeq:
    """
    Power sums t_1..t_K of the roots of p via the Newton recurrence

    t_k = -k p_k - sum_{i<k} p_i t_{k-i}, with p_k = 0 beyond the degree.
    At hardware precision the recurrence runs as an all-pole filter.

    Raises:
        OverflowAtIndex: first k whose t_k is not finite
    """
    if K < 1:
        raise InputError(ErrorMessage.BAD_CONFIG.format(detail=f"K={K} must be >= 1"))
    n = p.degree
    if precision.is_hardware:
        coeffs = np.asarray(p.as_floats(), dtype=float)
        drive = np.zeros(K, dtype=float)
        top = min(n, K)
        drive[:top] = -np.arange(1, top + 1) * coeffs[:top]
        with np.errstate(over='ignore', invalid='ignore'):
            t = signal.lfilter([1.0], np.concatenate(([1.0], coeffs)), drive)
        bad = np.flatnonzero(~np.isfinite(t))
        if bad.size:
            raise OverflowAtIndex(int(bad[0]) + 1)
        return PowerSumSeq(tuple(float(v) for v in t), n)

    coeffs_mp = [precision.real(c) for c in p.coeffs]
    values: List[Scalar] = []
    for k in range(1, K + 1):
        acc = -k * coeffs_mp[k - 1] if k <= n else precision.real(0)
        for i in range(1, min(k - 1, n) + 1):
            acc -= coeffs_mp[i - 1] * values[k - i - 1]
        if not precision.isfinite(acc):
            raise OverflowAtIndex(k)
        values.append(acc)
    return PowerSumSeq(tuple(values), n)


def coeffs_from_power_sums(t: PowerSumSeq, n: int,
                           precision: WorkingPrecision = HARDWARE) -> MonicRealPoly:
    """Invert the Newton recurrence: the monic degree-n polynomial with power sums t_1..t_n"""
    if len(t) < n:
        raise LengthMismatch(len(t), n)
    values = [precision.real(v) for v in t.values[:n]]
    coeffs: List[Scalar] = []
    for k in range(1, n + 1):
        acc = values[k - 1]
        for i in range(1, k):
            acc += coeffs[i - 1] * values[k - i - 1]
        coeffs.append(-acc / k)
    return MonicRealPoly(tuple(coeffs))


# ============================================================================
# Evaluation and roots
# ============================================================================

def evaluate(p: MonicRealPoly, z: ComplexScalar,
             precision: WorkingPrecision = HARDWARE) -> ComplexScalar:
    """Horner evaluation of p at z"""
    if precision.is_hardware:
        return complex(np.polyval(np.concatenate(([1.0], p.as_floats())), complex(z)))
    return precision.ctx.polyval([precision.real(1)] + [precision.real(c) for c in p.coeffs],
                                 precision.cplx(z))


def residual_scale(p: MonicRealPoly, z) -> np.ndarray:
    """max(1, sum_k |p_k| |z|^(n-k)), the rounding yardstick for p(z)"""
    magnitudes = np.concatenate(([1.0], np.abs(p.as_floats())))
    return np.maximum(1.0, np.polyval(magnitudes, np.abs(np.asarray(z, dtype=complex))))


def _symmetrize(roots: np.ndarray, threshold: float) -> List[complex]:
    """Snap near-real roots to the axis and force exact conjugate pairs"""
    out: List[complex] = []
    upper = [z for z in roots if z.imag > threshold]
    lower = [z for z in roots if z.imag < -threshold]
    out.extend(complex(z.real, 0.0) for z in roots if abs(z.imag) <= threshold)
    used = [False] * len(lower)
    for z in upper:
        candidates = [(abs(w - z.conjugate()), j) for j, w in enumerate(lower) if not used[j]]
        if not candidates:
            out.append(complex(z))
            continue
        _, j = min(candidates)
        used[j] = True
        mid = (z + lower[j].conjugate()) / 2
        out.extend((complex(mid), complex(mid).conjugate()))
    out.extend(complex(w) for j, w in enumerate(lower) if not used[j])
    return out


def _sort_roots(roots):
    return sorted(roots, key=lambda z: (-abs(z), -float(z.real), -float(z.imag)))


def _converged(p: MonicRealPoly, coeffs: np.ndarray, z: np.ndarray, tol_root: float) -> np.ndarray:
    return np.abs(np.polyval(coeffs, z)) <= tol_root * residual_scale(p, z)


def _aberth(p: MonicRealPoly, tol_root: float, max_iterations: int) -> np.ndarray:
    coeffs = np.concatenate(([1.0], p.as_floats()))
    derivative = np.polyder(coeffs)
    n = p.degree
    radius = 1.0 + max(abs(c) ** (1.0 / k) for k, c in enumerate(coeffs[1:], start=1))
    angles = 2.0 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)

    for iteration in range(1, max_iterations + 1):
        done = _converged(p, coeffs, z, tol_root)
        if np.all(done):
            logger.debug(f"Aberth iteration converged after {iteration - 1} steps (n={n})")
            return z
        values = np.polyval(coeffs, z)
        slopes = np.polyval(derivative, z)
        with np.errstate(divide='ignore', invalid='ignore'):
            newton = np.where(slopes != 0, values / slopes, values)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            repulsion = (1.0 / diff).sum(axis=1) - 1.0
            step = newton / (1.0 - newton * repulsion)
        step = np.where(np.isfinite(step), step, newton)
        z = z - np.where(done, 0.0, step)

    if np.all(_converged(p, coeffs, z, tol_root)):
        return z
    raise NoConvergence(max_iterations)


def find_roots(p: MonicRealPoly,
               tol_root: float = Tolerance.ROOT,
               max_iterations: int = RootFinder.MAX_ITERATIONS,
               precision: WorkingPrecision = HARDWARE) -> List[ComplexScalar]:
    """
    All n roots of p by simultaneous iteration

    Hardware precision runs Aberth-Ehrlich from a circle of radius
    1 + max |p_k|^(1/k); software precision delegates to mpmath's
    Durand-Kerner ``polyroots``. Output is conjugate-symmetric and sorted by
    decreasing modulus.

    Raises:
        NoConvergence: some |p(z)| above tol_root * max(1, sum |p_k| |z|^(n-k))
            at the iteration cap
    """
    if precision.is_hardware:
        z = _aberth(p, tol_root, max_iterations)
        threshold = math.sqrt(tol_root) * max(1.0, float(np.max(np.abs(z))))
        roots = _symmetrize(z, threshold)
        coeffs = np.concatenate(([1.0], p.as_floats()))
        # Symmetrizing can only move roots by O(threshold); re-check the residual
        if not np.all(_converged(p, coeffs, np.asarray(roots), tol_root)):
            logger.debug("Symmetrized roots exceed the residual target; keeping raw iterates")
            roots = [complex(v) for v in z]
        return _sort_roots(roots)

    ctx = precision.ctx
    try:
        roots = ctx.polyroots([1] + [precision.real(c) for c in p.coeffs],
                              maxsteps=max_iterations, extraprec=precision.bits)
    except ctx.NoConvergence as e:
        raise NoConvergence(max_iterations) from e
    return _sort_roots(list(roots))
