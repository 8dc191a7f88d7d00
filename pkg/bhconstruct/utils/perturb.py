"""
Root-perturbation bounds and the optimal matching distance between root sets
"""

import bisect
import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from bhconstruct.constants import BoundLimits, ErrorMessage, Search, Tolerance
from bhconstruct.errors import DegreeMismatch, DimensionTooSmall, InputError, LengthMismatch
from bhconstruct.utils.poly import MonicRealPoly, coeffs_from_roots, find_roots
from bhconstruct.utils.realize import jn_transform
from bhconstruct.utils.spectrum import SpectrumList

logger = logging.getLogger(__name__)

PERMUTATION_BATCH = 65536


@dataclass(frozen=True)
class PerturbBound:
    """Displacement bounds between the roots of two monic polynomials of equal degree"""
    n: int
    gamma_pair: float
    bound_bek: float
    bound_ostrowski: float
    coefficient_gap: Tuple[float, ...]


def bek_bound(f: MonicRealPoly, g: MonicRealPoly) -> PerturbBound:
    """
    Optimal-labelling displacement bound for the roots of f and g

    With gamma = 2 max |c_k|^(1/k) over both coefficient lists, the roots can
    be paired so that no pair is further apart than
    16/(3 sqrt 3) (sum_k |a_k - b_k| gamma^(n-k))^(1/n). The classical
    Ostrowski form replaces the leading factor by 2n - 1.
    """
    if f.degree != g.degree:
        raise DegreeMismatch(f.degree, g.degree)
    n = f.degree
    a = f.as_floats()
    b = g.as_floats()
    gamma = 2.0 * max(abs(c) ** (1.0 / k) for coeffs in (a, b)
                      for k, c in enumerate(coeffs, start=1))
    gap = tuple(abs(x - y) for x, y in zip(a, b))
    weighted = math.fsum(d * gamma ** (n - k) for k, d in enumerate(gap, start=1))
    root = weighted ** (1.0 / n)
    return PerturbBound(
        n=n,
        gamma_pair=gamma,
        bound_bek=BoundLimits.BEK_FACTOR * root,
        bound_ostrowski=(2 * n - 1) * root,
        coefficient_gap=gap,
    )


# ============================================================================
# Matching distance
# ============================================================================

def _distances(a: Sequence[complex], b: Sequence[complex]) -> np.ndarray:
    if len(a) != len(b):
        raise LengthMismatch(len(a), len(b))
    left = np.asarray([complex(z) for z in a])
    right = np.asarray([complex(z) for z in b])
    return np.abs(left[:, None] - right[None, :])


def _exhaustive(dist: np.ndarray) -> Tuple[float, Tuple[int, ...]]:
    n = dist.shape[0]
    rows = np.arange(n)
    best_value, best_perm = math.inf, tuple(range(n))
    permutations = itertools.permutations(range(n))
    while True:
        batch = np.array(list(itertools.islice(permutations, PERMUTATION_BATCH)), dtype=int)
        if batch.size == 0:
            break
        costs = dist[rows[None, :], batch].max(axis=1)
        i = int(np.argmin(costs))
        if costs[i] < best_value:
            best_value, best_perm = float(costs[i]), tuple(int(j) for j in batch[i])
    return best_value, best_perm


def _perfect_matching(dist: np.ndarray, threshold: float) -> Optional[np.ndarray]:
    graph = csr_matrix(dist <= threshold)
    matching = maximum_bipartite_matching(graph, perm_type='column')
    if (matching == -1).any():
        return None
    return matching


def _bottleneck(dist: np.ndarray) -> Tuple[float, Tuple[int, ...]]:
    values = np.unique(dist)
    index = bisect.bisect_left(values, True,
                               key=lambda t: _perfect_matching(dist, t) is not None)
    threshold = float(values[index])
    matching = _perfect_matching(dist, threshold)
    return threshold, tuple(int(j) for j in matching)


def optimal_matching(a: Sequence[complex], b: Sequence[complex],
                     mode: str = "bottleneck") -> Tuple[float, Tuple[int, ...]]:
    """
    Minimal max-displacement pairing between two equal-length lists

    Returns:
        (distance, assignment) with a[i] paired to b[assignment[i]]
    """
    dist = _distances(a, b)
    if dist.size == 0:
        return 0.0, ()
    if mode == "exhaustive":
        if dist.shape[0] > Search.EXHAUSTIVE_MATCHING_MAX_N:
            raise InputError(ErrorMessage.BAD_CONFIG.format(
                detail=f"exhaustive matching limited to n <= {Search.EXHAUSTIVE_MATCHING_MAX_N}"))
        return _exhaustive(dist)
    if mode == "bottleneck":
        return _bottleneck(dist)
    raise InputError(ErrorMessage.BAD_CONFIG.format(detail=f"unknown matching mode {mode!r}"))


def matching_distance(a: Sequence[complex], b: Sequence[complex],
                      mode: str = "bottleneck") -> float:
    """min over permutations pi of max_i |a_i - b_pi(i)|"""
    return optimal_matching(a, b, mode)[0]


# ============================================================================
# Padding-bound chain
# ============================================================================

def padding_gap_bound(f: MonicRealPoly, N: int, gamma: float) -> float:
    """
    Root displacement between f and J_N(f) for N > n^2

    16 gamma 2^(1/n) / (sqrt(3) N^(1/n)), which decreases like N^(-1/n).
    """
    n = f.degree
    if N <= n * n:
        raise DimensionTooSmall(N, f"N > n^2 = {n * n}")
    return 16.0 * gamma * 2.0 ** (1.0 / n) / (math.sqrt(3.0) * N ** (1.0 / n))


@dataclass(frozen=True)
class PerronImage:
    """Where the Perron root lands among the roots of J_N(f)"""
    N: int
    roots: Tuple[complex, ...]
    distance: float
    image: complex
    is_real: bool
    is_positive: bool
    is_dominant: bool

    @property
    def ok(self) -> bool:
        return self.is_real and self.is_positive and self.is_dominant


def perron_image(sigma: SpectrumList, N: int, tol_conj: float = Tolerance.CONJ) -> PerronImage:
    """
    Match the roots of J_N(f) to sigma and inspect the image of lambda_1

    The image must be real, positive and strictly dominant in modulus for the
    padded power sums to inherit positivity.
    """
    f = coeffs_from_roots(sigma.entries, tol_conj)
    roots: List[complex] = [complex(z) for z in find_roots(jn_transform(f, N))]
    distance, assignment = optimal_matching(sigma.entries, roots)
    image = roots[assignment[sigma.perron_index]]
    slack = tol_conj * max(abs(z) for z in roots)
    others = [abs(z) for j, z in enumerate(roots) if j != assignment[sigma.perron_index]]
    result = PerronImage(
        N=N,
        roots=tuple(roots),
        distance=distance,
        image=image,
        is_real=abs(image.imag) <= slack,
        is_positive=image.real > 0,
        is_dominant=all(abs(image) > m for m in others),
    )
    logger.debug(f"Perron image at N={N}: {image} (matching distance {distance:.3e})")
    return result
