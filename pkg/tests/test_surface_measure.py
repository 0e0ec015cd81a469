import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from backend.special_functions import sphere_ft
from backend.sphere_geometry import SQRT3_2, haar_rotation, slice_integral
from backend.surface_measure import (angular_constant, calibrate_constant, decay_bound, decay_fit,
                                     default_radial_nodes, envelope_window, fit_constant, mu_hat_closed,
                                     mu_hat_closed_batch, mu_hat_gradient, mu_hat_mc, standard_rays)
from models.data_models import DecayDirection, FrequencyBatch, FrequencyPair, QuadratureSpec
from models.exceptions import DimensionError, DomainError


def _pair(d, norm_xi, norm_eta, theta):
    return FrequencyPair.from_angle(norm_xi, norm_eta, theta, d)


def _fiber_sliced(fp: FrequencyPair) -> float:
    """mu_hat as an integral over u of the fiber transform, an oracle independent of the closed form"""
    d = fp.dimension
    shift = fp.xi + 0.5 * fp.eta

    def integrand(u):
        along = u @ fp.eta
        perp = np.sqrt(np.maximum(fp.norm_eta**2 - along**2, 0.0))
        return np.cos(2 * math.pi * (u @ shift)) * sphere_ft(d - 2, SQRT3_2 * perp)

    quad = QuadratureSpec(n_radial=96, n_outer=96)
    return slice_integral(integrand, d, quad).value


# ============================================================================
# CLOSED FORM
# ============================================================================

@pytest.mark.parametrize("d", [3, 4, 5, 8])
def test_mu_hat_at_origin(d):
    assert mu_hat_closed(FrequencyPair(np.zeros(d), np.zeros(d))) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_single_sphere_reduction(d):
    radii = np.linspace(0.0, 20.0, 81)
    xi = np.zeros((radii.size, d))
    xi[:, 0] = radii
    values = mu_hat_closed_batch(FrequencyBatch.from_vectors(xi, np.zeros_like(xi)))
    np.testing.assert_allclose(values, sphere_ft(d - 1, radii), atol=1e-10)


@pytest.mark.parametrize("d", [3, 4])
@pytest.mark.parametrize("norm_xi, norm_eta, theta", [(0.7, 1.1, 0.4), (1.5, 0.3, 2.2), (1.2, 1.2, 1.5708)])
def test_closed_form_matches_fiber_slicing(d, norm_xi, norm_eta, theta):
    fp = _pair(d, norm_xi, norm_eta, theta)
    assert mu_hat_closed(fp) == pytest.approx(_fiber_sliced(fp), abs=1e-7)


@pytest.mark.parametrize("d", [3, 5])
def test_closed_form_matches_monte_carlo(d):
    fp = _pair(d, 1.3, 0.8, 1.0)
    estimate = mu_hat_mc(fp, 200_000, seed=9)
    closed = mu_hat_closed(fp)
    assert abs(estimate.value.real - closed) <= 4 * estimate.se_real
    assert abs(estimate.value.imag) <= 4 * estimate.se_imag


def test_monte_carlo_is_seeded():
    fp = _pair(3, 2.0, 1.0, 0.5)
    assert mu_hat_mc(fp, 5000, seed=1) == mu_hat_mc(fp, 5000, seed=1)
    assert mu_hat_mc(fp, 5000, seed=1).value != mu_hat_mc(fp, 5000, seed=2).value


def test_swap_and_rotation_invariance(rng):
    fp = FrequencyPair(rng.standard_normal(5), rng.standard_normal(5))
    value = mu_hat_closed(fp)
    assert mu_hat_closed(fp.swapped()) == pytest.approx(value, abs=1e-11)
    assert mu_hat_closed(fp.rotated(haar_rotation(rng, 5))) == pytest.approx(value, abs=1e-11)


def test_batch_matches_pointwise():
    pairs = [_pair(4, r, 0.5 * r, 0.3 * r) for r in (0.5, 3.0, 12.0)]
    batch = FrequencyBatch.from_pairs(pairs)
    expected = [mu_hat_closed(fp) for fp in pairs]
    np.testing.assert_allclose(mu_hat_closed_batch(batch), expected, atol=1e-12)


def test_more_radial_nodes_do_not_move_the_value():
    fp = _pair(5, 6.0, 4.0, 1.1)
    assert mu_hat_closed(fp, n_radial=400) == pytest.approx(mu_hat_closed(fp), abs=1e-12)


def test_closed_form_domain():
    with pytest.raises(DimensionError):
        mu_hat_closed(FrequencyPair([1.0, 0.0], [0.0, 1.0]))
    with pytest.raises(DomainError):
        mu_hat_closed(_pair(3, 1.0, 1.0, 0.0), n_radial=2)


@given(norm_xi=st.floats(0.0, 30.0), norm_eta=st.floats(0.0, 30.0), theta=st.floats(0.0, math.pi),
       d=st.integers(3, 7))
def test_mu_hat_bounded(norm_xi, norm_eta, theta, d):
    assert abs(mu_hat_closed(_pair(d, norm_xi, norm_eta, theta))) <= 1.0 + 1e-9


def test_node_law_and_angular_constant():
    assert default_radial_nodes(0.0) == 32
    assert default_radial_nodes(2.5) == 62
    # density of the polar angle integrates to one
    assert angular_constant(3) == pytest.approx(0.5)


# ============================================================================
# GRADIENT AND DECAY
# ============================================================================

def test_gradient_vanishes_at_origin_and_is_bounded():
    zero = FrequencyPair(np.zeros(3), np.zeros(3))
    np.testing.assert_allclose(mu_hat_gradient(zero), 0.0, atol=1e-6)
    grad = mu_hat_gradient(_pair(3, 2.0, 1.5, 0.7))
    assert grad.shape == (6,)
    assert np.all(np.abs(grad) <= 2 * math.pi + 1e-6)


def test_decay_bound_values():
    assert decay_bound(FrequencyPair(np.zeros(5), np.zeros(5)), 5) == 1.0
    fp = _pair(5, 3.0, 4.0, 0.5 * math.pi)
    assert decay_bound(fp, 5) == pytest.approx((1 + 3.0) ** -1.5 * (1 + 5.0) ** -1.5)
    with pytest.raises(DimensionError):
        decay_bound(fp, 2)


def test_fit_and_calibrated_constants():
    d = 4
    grid = [_pair(d, a, b, t) for a in (0.0, 1.0, 3.0) for b in (0.0, 2.0) for t in (0.3, 1.5)]
    assert fit_constant(grid, d) >= 1.0
    rough = calibrate_constant(d, radius=4.0, n_norm=9, n_theta=5, refine=False)
    refined = calibrate_constant(d, radius=4.0, n_norm=9, n_theta=5, refine=True)
    assert 1.0 <= rough <= refined < 50.0
    with pytest.raises(DomainError):
        fit_constant(grid, 5)


def test_standard_rays():
    rays = dict((direction.name, expected) for direction, expected in standard_rays(5))
    assert rays == {"axis": -2.0, "orthogonal": -3.0, "parallel": -1.5}


def test_envelope_window_of_orthogonal_ray():
    direction = dict((d.name, d) for d, _ in standard_rays(5))["orthogonal"]
    assert envelope_window(direction) == pytest.approx(1.0 / (1.0 - SQRT3_2))


@pytest.mark.parametrize("name", ["axis", "orthogonal", "parallel"])
def test_decay_slopes(name):
    direction, expected = next((d, e) for d, e in standard_rays(5) if d.name == name)
    fit = decay_fit(direction)
    assert fit.slope <= expected + 0.3
    assert len(fit.rows()) == len(fit.radii)
    assert np.all(np.diff(fit.radii) > 0)


def test_axis_slope_is_sharp():
    direction = standard_rays(5)[0][0]
    assert decay_fit(direction).slope == pytest.approx(-2.0, abs=0.25)


def test_decay_fit_arguments():
    direction = DecayDirection((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), 1.0)
    with pytest.raises(DomainError):
        decay_fit(direction, r_min=1.0)
    with pytest.raises(DomainError):
        decay_fit(direction, n_radii=1)
    with pytest.raises(DomainError):
        DecayDirection((1.0, 1.0, 0.0), (0.0, 1.0, 0.0), 1.0)
