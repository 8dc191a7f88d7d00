"""
Numerical building blocks: precision, polynomials, spectra, bounds and realization
"""
