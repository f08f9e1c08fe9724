import numpy as np
import pytest

from pvtnet.errors import BranchCutError, NumericsError
from pvtnet.numerics import upper_gamma, upper_gamma_ray_quadrature


def test_order_one_closed_form():
    # Gamma(1, z) = e^-z
    assert upper_gamma(1, 1.0) == pytest.approx(np.exp(-1.0), rel=1e-12)
    assert upper_gamma(1, 2.5 - 1.0j) == pytest.approx(np.exp(-(2.5 - 1.0j)), rel=1e-12)


def test_at_zero_argument():
    assert upper_gamma(2, 0.0) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(NumericsError):
        upper_gamma(-1.8, 0.0)


def test_vanishing_upper_tail():
    assert abs(upper_gamma(-1.8, 50.0)) < 1e-20


@pytest.mark.parametrize("s", [-1.8, -1.2, -2.0, -0.5, 0.2, 1.5, 2.0])
def test_against_ray_quadrature_oracle(s):
    # The artifact's operating domain: imaginary axis both signs, right
    # half-plane, plus moderate angles; 1e-8 relative target.
    zs = [0.01j, -0.1j, 0.5j, -2.0j, 5.0j, -11.9j, 12.1j, -30.0j, 100.0j,
          -1000.0j, 1.0 + 1.0j, 8.0 - 0.5j, 3.0, 40.0,
          10.0 * np.exp(1.0j * np.deg2rad(135))]
    for z in zs:
        ref = upper_gamma_ray_quadrature(s, z)
        val = upper_gamma(s, z)
        assert abs(val - ref) <= 1e-8 * max(abs(ref), 1e-300), f"z={z}"


def test_vectorized_matches_scalar():
    zs = -1j * np.logspace(-4, 3, 50)
    vec = upper_gamma(-1.8, zs)
    sc = np.array([upper_gamma(-1.8, z) for z in zs])
    assert np.allclose(vec, sc, rtol=1e-13)


def test_conjugate_symmetry_on_imaginary_axis():
    zs = -1j * np.logspace(-3, 2, 24)
    assert np.allclose(upper_gamma(-1.8, np.conj(zs)),
                       np.conj(upper_gamma(-1.8, zs)), rtol=1e-12)


def test_branch_cut_rejected():
    with pytest.raises(BranchCutError):
        upper_gamma(-1.8, -3.0)


def test_integer_order_on_cut_is_fine():
    # entire function for positive integer order
    assert upper_gamma(1, -2.0) == pytest.approx(np.exp(2.0), rel=1e-12)


def test_order_strip_enforced():
    with pytest.raises(NumericsError):
        upper_gamma(3.5, 1.0)


def test_mpmath_cross_check():
    mp = pytest.importorskip("mpmath")
    for s, z in [(-1.8, -0.3j), (-1.8, -7.0j), (-1.2, 15.0j), (-2.0, -4.0j)]:
        ref = complex(mp.gammainc(mp.mpf(s), a=z, b=mp.inf))
        assert upper_gamma(s, z) == pytest.approx(ref, rel=1e-10)
