# Test fixtures and configuration
import cmath
import math

import mpmath
import numpy as np
import pytest

from bhconstruct.constants import Precision, ReferenceSpectra


def disk_entries(rho=ReferenceSpectra.DISK_RHO, theta=ReferenceSpectra.DISK_THETA):
    """(rho, e^{i theta}, e^{-i theta})"""
    pair = cmath.exp(1j * theta)
    return [complex(rho), pair, pair.conjugate()]


@pytest.fixture
def disk_spectrum():
    """Validated reference spectrum (1.1, e^{i pi/10}, e^{-i pi/10})"""
    from bhconstruct.utils.spectrum import validate

    return validate(disk_entries())


@pytest.fixture
def disk_poly():
    """Monic cubic whose roots are the reference spectrum"""
    from bhconstruct.utils.poly import coeffs_from_roots

    return coeffs_from_roots(disk_entries())


@pytest.fixture
def rng():
    """Seeded generator for randomized property checks"""
    return np.random.default_rng(20240611)


@pytest.fixture
def oracle_roots():
    """Roots of a monic polynomial from mpmath.polyroots at 256 bits"""
    def roots(poly):
        with mpmath.workprec(Precision.ORACLE_BITS):
            found = mpmath.polyroots([1] + [mpmath.mpf(float(c)) for c in poly.coeffs],
                                     maxsteps=400, extraprec=Precision.ORACLE_BITS)
        return [complex(z) for z in found]
    return roots


@pytest.fixture
def random_dominant_spectrum(rng):
    """
    Factory for conjugate-closed lists with a strictly dominant Perron root

    Non-Perron entries lie in the disk of radius gap_ratio * lambda_1.
    """
    def make(n, lambda1=1.0, gap_ratio=0.5, real=False):
        entries = [complex(lambda1)]
        while len(entries) < n:
            radius = gap_ratio * lambda1 * math.sqrt(rng.uniform(0.0, 1.0))
            if real or len(entries) == n - 1 or rng.uniform() < 0.5:
                entries.append(complex(radius * rng.choice([-1.0, 1.0])))
            else:
                angle = rng.uniform(0.0, math.pi)
                z = cmath.rect(radius, angle)
                entries.extend([z, z.conjugate()])
        return entries
    return make
