import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma, jv

from backend.special_functions import (bessel_j, normalized_kernel, recurrence_switch_point, series_switch_point,
                                       sphere_ft)
from backend.sphere_geometry import make_rng, uniform_sphere
from models.data_models import BesselOrder
from models.exceptions import DomainError

ARGUMENTS = np.concatenate([np.linspace(0.0, 40.0, 401), np.geomspace(40.0, 1e4, 200)])


# ============================================================================
# BESSEL FUNCTIONS
# ============================================================================

def test_bessel_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(2.5, 0.0) == 0.0


def test_bessel_half_order_at_pi():
    assert abs(bessel_j(0.5, math.pi)) < 1e-14


def test_bessel_order_one_at_one():
    assert bessel_j(1, 1.0) == pytest.approx(0.4400505857449335, rel=1e-12)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 1.5, 2.3, 3.5, 5.0, 6.0, 7.5, 8.25, 10.0])
def test_bessel_matches_scipy(nu):
    ours = bessel_j(nu, ARGUMENTS)
    np.testing.assert_allclose(ours, jv(nu, ARGUMENTS), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("nu", [14.5, 20.0, 33.7])
def test_bessel_matches_scipy_at_high_order(nu):
    t = np.concatenate([np.linspace(0.0, 120.0, 601), [390.0, 1e3, 9999.0]])
    np.testing.assert_allclose(bessel_j(nu, t), jv(nu, t), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("nu", [0.0, 1.0, 2.3, 5.0, 6.5, 10.0, 17.0])
def test_bessel_continuous_across_switches(nu):
    for switch in (series_switch_point(nu), recurrence_switch_point(nu)):
        below, at, above = bessel_j(nu, np.array([switch * (1 - 1e-12), switch, switch * (1 + 1e-12)]))
        assert below == pytest.approx(at, abs=1e-9)
        assert above == pytest.approx(at, abs=1e-9)


@pytest.mark.parametrize("nu", [1.0, 2.5, 4.2, 9.0])
def test_bessel_derivative_recurrence(nu):
    t = np.linspace(0.5, 60.0, 240)
    h = 1e-3
    numeric = (8 * (bessel_j(nu, t + h) - bessel_j(nu, t - h))
               - bessel_j(nu, t + 2 * h) + bessel_j(nu, t - 2 * h)) / (12 * h)
    recurrence = 0.5 * (bessel_j(nu - 1, t) - bessel_j(nu + 1, t))
    np.testing.assert_allclose(numeric, recurrence, atol=1e-8)


def test_bessel_accepts_order_object_and_keeps_shape():
    t = np.linspace(0.0, 5.0, 12).reshape(3, 4)
    out = bessel_j(BesselOrder(1.5), t)
    assert out.shape == (3, 4)
    assert isinstance(bessel_j(1.5, 2.0), float)


@pytest.mark.parametrize("order, t", [(0, -1.0), (0, float("nan")), (0, float("inf")), (-1, 1.0)])
def test_bessel_domain_errors(order, t):
    with pytest.raises(DomainError):
        bessel_j(order, t)


@given(nu=st.floats(0.0, 20.0), t=st.floats(0.0, 1e4))
def test_bessel_bounded(nu, t):
    assert abs(bessel_j(nu, t)) <= 1.0 + 1e-9


# ============================================================================
# NORMALIZED KERNELS
# ============================================================================

@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 3.5])
def test_normalized_kernel(nu):
    assert normalized_kernel(nu, 0.0) == pytest.approx(1.0 / (2**nu * gamma(nu + 1)), rel=1e-14)
    t = np.linspace(0.1, 50.0, 300)
    np.testing.assert_allclose(normalized_kernel(nu, t), jv(nu, t) / t**nu, rtol=1e-8, atol=1e-12)


def test_sphere_ft_low_dimensions():
    s = np.linspace(0.0, 10.0, 201)
    np.testing.assert_allclose(sphere_ft(1, s), jv(0, 2 * np.pi * s), atol=1e-11)
    x = 2 * np.pi * s[1:]
    np.testing.assert_allclose(sphere_ft(2, s[1:]), np.sin(x) / x, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
def test_sphere_ft_normalized(n):
    assert sphere_ft(n, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_sphere_ft_domain():
    with pytest.raises(DomainError):
        sphere_ft(0, 1.0)
    with pytest.raises(DomainError):
        sphere_ft(2, -0.5)


@given(n=st.integers(1, 9), s=st.floats(0.0, 500.0))
def test_sphere_ft_bounded(n, s):
    assert abs(sphere_ft(n, s)) <= 1.0 + 1e-9


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 1.5])
def test_normalized_kernel_derivative(nu):
    # d/dt [t^-nu J_nu(t)] = -t^-nu J_{nu+1}(t)
    t = np.linspace(0.1, 50.0, 400)
    h = 1e-5
    numeric = (normalized_kernel(nu, t + h) - normalized_kernel(nu, t - h)) / (2 * h)
    np.testing.assert_allclose(numeric, -normalized_kernel(nu + 1, t) * t, rtol=1e-6, atol=1e-7)


@pytest.mark.parametrize("n", [10, 17, 22])
def test_sphere_ft_high_dimensions(n):
    nu = 0.5 * (n - 1)
    s = np.linspace(0.05, 40.0, 300)
    x = 2 * np.pi * s
    expected = gamma(nu + 1) * 2**nu * jv(nu, x) / x**nu
    np.testing.assert_allclose(sphere_ft(n, s), expected, rtol=1e-9, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_sphere_ft_decay(n):
    s = np.linspace(0.0, 100.0, 20001)
    scaled = np.abs(sphere_ft(n, s)) * (1 + s) ** (n / 2)
    assert np.all(np.isfinite(scaled))
    # the bound holds uniformly: the far half stays within the near half's maximum
    assert scaled[s > 50].max() <= 1.5 * scaled[s <= 50].max()


def test_sphere_ft_matches_sphere_sampling():
    n = 1_000_000
    points = uniform_sphere(make_rng(17), n, 4)
    waves = np.cos(2 * np.pi * 0.5 * points[:, 0])
    se = waves.std() / math.sqrt(n)
    assert abs(waves.mean() - sphere_ft(3, 0.5)) < 3 * se
