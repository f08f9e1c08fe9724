"""Shared numerical machinery: complex special functions, adaptive
quadrature, characteristic functions, and CF -> distribution inversion."""

from .cf import CharFunc, check_cf_invariants, empirical_cf
from .gamma_inc import upper_gamma, upper_gamma_ray_quadrature
from .inversion import (
    DistributionTable,
    damped_density,
    fft_density,
    gil_pelaez_cdf,
    invert_cf_to_cdf,
    invert_cf_to_pdf,
)
from .quadrature import (
    IntegralResult,
    gauss_hermite_standard_normal,
    gauss_laguerre_unit_exponential,
    gauss_legendre_01,
    integrate_adaptive,
)

__all__ = [
    "CharFunc",
    "DistributionTable",
    "IntegralResult",
    "check_cf_invariants",
    "damped_density",
    "empirical_cf",
    "fft_density",
    "gauss_hermite_standard_normal",
    "gauss_laguerre_unit_exponential",
    "gauss_legendre_01",
    "gil_pelaez_cdf",
    "integrate_adaptive",
    "invert_cf_to_cdf",
    "invert_cf_to_pdf",
    "upper_gamma",
    "upper_gamma_ray_quadrature",
]
