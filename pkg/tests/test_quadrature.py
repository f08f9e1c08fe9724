import numpy as np
import pytest

from pvtnet.errors import NumericsError
from pvtnet.numerics import (
    gauss_hermite_standard_normal,
    gauss_laguerre_unit_exponential,
    gauss_legendre_01,
    integrate_adaptive,
)

LAMBDA_B = 1.0 / (np.pi * 800.0 ** 2)


def test_unit_exponential():
    res = integrate_adaptive(lambda t: np.exp(-t), 0.0, np.inf, tol=1e-12)
    assert res.value == pytest.approx(1.0, abs=1e-11)


def test_arctan_pi():
    res = integrate_adaptive(lambda t: 4.0 / (1.0 + t * t), 0.0, 1.0, tol=1e-12)
    assert res.value == pytest.approx(np.pi, abs=1e-11)


@pytest.mark.parametrize("lam", [LAMBDA_B, 1.0, 0.3])
def test_cubic_gaussian_moment(lam):
    # integral_0^inf x^3 e^(-2 pi lam x^2) dx = 1 / (8 (pi lam)^2)
    res = integrate_adaptive(lambda x: x ** 3 * np.exp(-2.0 * np.pi * lam * x * x),
                             0.0, np.inf, tol=1e-13)
    expect = 1.0 / (8.0 * (np.pi * lam) ** 2)
    assert abs(res.value - expect) <= 1e-10 * expect


def test_complex_integrand():
    res = integrate_adaptive(lambda t: np.exp((1j - 1.0) * t), 0.0, np.inf, tol=1e-12)
    assert res.value == pytest.approx(1.0 / (1.0 - 1.0j), abs=1e-10)


def test_error_estimate_reported():
    res = integrate_adaptive(lambda t: np.sin(3.0 * t) ** 2, 0.0, 2.0, tol=1e-10)
    assert res.error <= 1e-9
    assert res.value == pytest.approx(1.0 - np.sin(12.0) / 12.0, abs=1e-9)


def test_subdivision_cap_raises_with_estimate():
    # absurdly oscillatory with a tiny budget
    with pytest.raises(NumericsError) as exc:
        integrate_adaptive(lambda t: np.sin(5e4 * t), 0.0, 1.0, tol=1e-14, limit=5)
    assert exc.value.value is not None
    assert exc.value.error_estimate is not None


def test_gauss_rules_match_moments():
    x, w = gauss_legendre_01(64)
    assert np.dot(w, x ** 5) == pytest.approx(1.0 / 6.0, rel=1e-13)
    h, wh = gauss_hermite_standard_normal(64)
    assert np.dot(wh, h ** 2) == pytest.approx(1.0, rel=1e-12)      # Var of N(0,1)
    assert np.dot(wh, h ** 4) == pytest.approx(3.0, rel=1e-12)
    t, wt = gauss_laguerre_unit_exponential(64)
    assert np.dot(wt, t) == pytest.approx(1.0, rel=1e-12)           # E[Exp(1)]
    assert np.dot(wt, t ** 3) == pytest.approx(6.0, rel=1e-10)
