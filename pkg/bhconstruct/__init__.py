"""
bhconstruct - Constructive nonnegative realization of spectra padded with zeros

Given a list of complex numbers with a strictly dominant Perron element and
positive power sums, bhconstruct finds a dimension N for which the list plus
N - n zeros is the spectrum of an entrywise-nonnegative matrix with the X_N
pattern, builds that matrix and verifies it.
"""

from bhconstruct._version import __version__

__author__ = "bhconstruct developers"
__license__ = "GPL-3.0"

# Application metadata
APP_NAME = "bhconstruct"

# Minimum requirements
MIN_PYTHON_VERSION = (3, 10)
