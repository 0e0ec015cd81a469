# ============================================================================
# SURFACE MEASURE
# ============================================================================
#
# Fourier transform mu_hat(xi, eta) of the normalized measure on the triangle
# manifold, by Monte Carlo over manifold samples and by a one-dimensional Bessel
# integral in the polar angle phi measured from eta:
#
#   mu_hat = avg_phi[ cos(2 pi A cos phi) sigma_{d-2}(B sin phi) sigma_{d-2}(C sin phi) ]
#   A = |xi| cos(theta) + |eta| / 2,  B = |xi| |sin(theta)|,  C = sqrt(3)/2 |eta|
#
# where avg_phi is the average against sin^{d-2}(phi) on [0, pi/2].

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from backend.special_functions import sphere_ft
from backend.sphere_geometry import SQRT3_2, gauss_legendre, iter_manifold_chunks, make_rng
from models.data_models import (DecayDirection, DecayFit, FrequencyBatch, FrequencyPair,
                                MonteCarloEstimate)
from models.exceptions import DimensionError, DomainError, FitError

logger = logging.getLogger(__name__)

Frequencies = Union[FrequencyPair, FrequencyBatch]

MIN_RADIAL_NODES = 8
_MAX_CHUNK_CELLS = 1 << 19
_MIN_ENVELOPE_POINTS = 5


# ============================================================================
# MONTE CARLO
# ============================================================================

def mu_hat_mc(fp: FrequencyPair, n_samples: int, seed: int) -> MonteCarloEstimate:
    """Sample mean of exp(-2 pi i (xi.u + eta.v)) over the manifold measure"""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = make_rng(seed)
    sums = np.zeros(4)
    for u, v in iter_manifold_chunks(rng, fp.dimension, n_samples):
        phase = 2.0 * math.pi * (u @ fp.xi + v @ fp.eta)
        c = np.cos(phase)
        s = np.sin(phase)
        sums += (c.sum(), s.sum(), np.dot(c, c), np.dot(s, s))
    mean_c = sums[0] / n_samples
    mean_s = sums[1] / n_samples
    if n_samples > 1:
        var_c = max(0.0, (sums[2] - n_samples * mean_c**2) / (n_samples - 1))
        var_s = max(0.0, (sums[3] - n_samples * mean_s**2) / (n_samples - 1))
    else:
        var_c = var_s = 0.0
    return MonteCarloEstimate(
        value=complex(mean_c, -mean_s),
        se_real=math.sqrt(var_c / n_samples),
        se_imag=math.sqrt(var_s / n_samples),
        n_samples=n_samples,
    )


# ============================================================================
# CLOSED FORM
# ============================================================================

def default_radial_nodes(joint_norm: float) -> int:
    """Gauss-Legendre nodes in phi for frequencies of size |(xi, eta)|"""
    return 32 + 10 * int(math.ceil(joint_norm))


def angular_constant(d: int) -> float:
    """Density constant of the polar angle on S^{d-1}: Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2))"""
    return math.gamma(0.5 * d) / (math.sqrt(math.pi) * math.gamma(0.5 * (d - 1)))


def _as_batch(fp: Frequencies) -> FrequencyBatch:
    if isinstance(fp, FrequencyBatch):
        return fp
    return FrequencyBatch.from_pairs([fp])


def _closed_chunk(A, B, C, d: int, n_nodes: int) -> np.ndarray:
    phi, w = gauss_legendre(n_nodes, 0.0, 0.5 * math.pi)
    weights = w * np.sin(phi) ** (d - 2)
    weights /= weights.sum()
    cos_phi = np.cos(phi)
    sin_phi = np.sin(phi)
    oscillation = np.cos(2.0 * math.pi * A[:, None] * cos_phi[None, :])
    kernel = sphere_ft(d - 2, B[:, None] * sin_phi[None, :]) * sphere_ft(d - 2, C[:, None] * sin_phi[None, :])
    return (oscillation * kernel) @ weights


def mu_hat_closed_batch(batch: FrequencyBatch, n_radial: Optional[int] = None) -> np.ndarray:
    """mu_hat at every pair of a batch; node count follows the largest |(xi, eta)| of each chunk"""
    d = batch.dimension
    if d < 3:
        raise DimensionError("mu_hat_closed", d, 3)
    if n_radial is not None and n_radial < MIN_RADIAL_NODES:
        raise DomainError(f"n_radial must be >= {MIN_RADIAL_NODES}")
    A = np.ravel(batch.norm_xi * batch.cos_theta + 0.5 * batch.norm_eta)
    B = np.ravel(batch.norm_xi * batch.sin_theta)
    C = np.ravel(SQRT3_2 * batch.norm_eta)
    joint = np.ravel(batch.joint_norm)
    out = np.empty(A.shape)
    if A.size == 0:
        return out.reshape(np.shape(batch.norm_xi))

    order = np.argsort(joint, kind="stable")
    start = 0
    while start < order.size:
        n_nodes = max(n_radial or 0, default_radial_nodes(joint[order[min(order.size - 1, start)]]))
        rows = max(1, _MAX_CHUNK_CELLS // n_nodes)
        idx = order[start:start + rows]
        n_nodes = max(n_radial or 0, default_radial_nodes(joint[idx[-1]]))
        out[idx] = _closed_chunk(A[idx], B[idx], C[idx], d, n_nodes)
        start += rows
    return out.reshape(np.shape(batch.norm_xi))


def mu_hat_closed(fp: FrequencyPair, n_radial: Optional[int] = None) -> float:
    """mu_hat(xi, eta) from the Bessel integral; real by the +/- symmetry of the slicing"""
    if fp.dimension < 3:
        raise DimensionError("mu_hat_closed", fp.dimension, 3)
    return float(np.ravel(mu_hat_closed_batch(_as_batch(fp), n_radial))[0])


def mu_hat_gradient(fp: FrequencyPair, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of mu_hat in R^{2d}, ordered (d/dxi, d/deta)"""
    d = fp.dimension
    base = np.concatenate([fp.xi, fp.eta])
    shifts = h * np.eye(2 * d)
    plus = base[None, :] + shifts
    minus = base[None, :] - shifts
    stacked = np.concatenate([plus, minus])
    batch = FrequencyBatch.from_vectors(stacked[:, :d], stacked[:, d:])
    n_nodes = default_radial_nodes(float(np.max(batch.joint_norm)))
    values = mu_hat_closed_batch(batch, n_nodes)
    return (values[:2 * d] - values[2 * d:]) / (2.0 * h)


# ============================================================================
# DECAY ESTIMATE
# ============================================================================

def decay_bound(fp: Frequencies, d: int):
    """(1 + min(|xi|,|eta|) |sin theta|)^{-(d-2)/2} (1 + |(xi, eta)|)^{-(d-2)/2}"""
    if d < 3:
        raise DimensionError("decay_bound", d, 3)
    power = -0.5 * (d - 2)
    smaller = np.minimum(fp.norm_xi, fp.norm_eta) * fp.sin_theta
    value = (1.0 + smaller) ** power * (1.0 + fp.joint_norm) ** power
    return float(value) if np.ndim(value) == 0 else value


def _bound_ratios(batch: FrequencyBatch) -> np.ndarray:
    return np.abs(mu_hat_closed_batch(batch)) / decay_bound(batch, batch.dimension)


def fit_constant(grid: Union[Sequence[FrequencyPair], FrequencyBatch], d: int) -> float:
    """sup over the grid of |mu_hat| / decay_bound"""
    batch = grid if isinstance(grid, FrequencyBatch) else FrequencyBatch.from_pairs(list(grid))
    if len(batch) == 0:
        raise DomainError("empty calibration grid")
    if batch.dimension != d:
        raise DomainError(f"grid dimension {batch.dimension} does not match d={d}")
    return float(np.max(_bound_ratios(batch)))


def calibrate_constant(d: int, radius: float = 10.0, n_norm: int = 41, n_theta: int = 13,
                       refine: bool = True) -> float:
    """
    Decay constant over |xi|, |eta| <= radius.

    The sup is taken on a lattice in (|xi|, |eta|, theta) and then pushed up by a local
    Nelder-Mead search started from the best lattice points.
    """
    norms = np.linspace(0.0, radius, n_norm)
    thetas = np.linspace(0.0, math.pi, n_theta)
    nx, ne, th = np.meshgrid(norms, norms, thetas, indexing="ij")
    batch = FrequencyBatch.from_angles(nx.ravel(), ne.ravel(), th.ravel(), d)
    ratios = _bound_ratios(batch)
    best = float(np.max(ratios))
    if not refine:
        return best

    def negative_ratio(params):
        point = FrequencyBatch.from_angles([params[0]], [params[1]], [params[2]], d)
        return -float(_bound_ratios(point)[0])

    bounds = [(0.0, radius), (0.0, radius), (0.0, math.pi)]
    for start in np.argsort(ratios)[-3:]:
        x0 = np.array([nx.ravel()[start], ne.ravel()[start], th.ravel()[start]])
        result = minimize(negative_ratio, x0, method="Nelder-Mead", bounds=bounds,
                          options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 400})
        best = max(best, -float(result.fun))
    logger.info("✓ calibrated decay constant d=%d radius=%g: C=%.6f", d, radius, best)
    return best


# ============================================================================
# DECAY FITS
# ============================================================================

def standard_rays(d: int) -> List[Tuple[DecayDirection, float]]:
    """The three rays of the decay check, each with the slope it is compared against"""
    if d < 3:
        raise DimensionError("standard_rays", d, 3)
    e1 = tuple(np.eye(d)[0])
    e2 = tuple(np.eye(d)[1])
    return [
        (DecayDirection(e1, e2, 0.0, "axis"), -0.5 * (d - 1)),
        (DecayDirection(e2, e1, 1.0, "orthogonal"), -(d - 2.0)),
        (DecayDirection(e1, e1, 1.0, "parallel"), -0.5 * (d - 2)),
    ]


def _base_frequencies(direction: DecayDirection) -> List[float]:
    """A, B, C per unit R along a ray"""
    unit = direction.batch(np.array([1.0]))
    a = abs(float(unit.norm_xi[0] * unit.cos_theta[0] + 0.5 * unit.norm_eta[0]))
    b = float(unit.norm_xi[0] * unit.sin_theta[0])
    c = float(SQRT3_2 * unit.norm_eta[0])
    return [a, b, c]


def _ray_frequencies(direction: DecayDirection) -> List[float]:
    """Oscillation frequencies (cycles per unit R) of the integrand along a ray, with their beats"""
    base = _base_frequencies(direction)
    pairs = [abs(x - y) for i, x in enumerate(base) for y in base[i + 1:]]
    return [f for f in base + pairs if f > 1e-9]


def envelope_window(direction: DecayDirection, max_window: float = 8.0) -> float:
    """Width in R of one period of the slowest oscillation along the ray"""
    frequencies = _ray_frequencies(direction)
    if not frequencies:
        return 1.0
    return min(max_window, 1.0 / min(frequencies))


def decay_fit(direction: DecayDirection, n_radii: int = 30, r_min: float = 2.0,
              r_max: float = 200.0) -> DecayFit:
    """
    Slope of log |mu_hat| against log R along a ray.

    |mu_hat| is maximized over a window of one period starting at each geometric radius, which
    removes the Bessel zeros before the least-squares fit.
    """
    d = direction.dimension
    if d < 3:
        raise DimensionError("decay_fit", d, 3)
    if r_min < 2.0 or r_max <= r_min or n_radii < 2:
        raise DomainError("decay_fit needs 2 <= r_min < r_max and n_radii >= 2")

    window = envelope_window(direction)
    per_window = max(16, int(math.ceil(8.0 * window * sum(_base_frequencies(direction)))))
    starts = np.geomspace(r_min, r_max, n_radii)
    offsets = np.linspace(0.0, window, per_window)
    radii = (starts[:, None] + offsets[None, :]).ravel()
    values = np.abs(mu_hat_closed_batch(direction.batch(radii))).reshape(n_radii, per_window)
    envelope = values.max(axis=1)

    keep = np.isfinite(envelope) & (envelope > 0)
    if int(keep.sum()) < _MIN_ENVELOPE_POINTS:
        raise FitError(f"only {int(keep.sum())} envelope points survived on ray {direction.name}")
    log_r = np.log(starts[keep])
    log_env = np.log(envelope[keep])
    slope, intercept = np.polyfit(log_r, log_env, 1)
    residual = float(np.sqrt(np.mean((log_env - (slope * log_r + intercept)) ** 2)))

    bound = decay_bound(direction.batch(starts), d)
    bound_slope = float(np.polyfit(log_r, np.log(bound[keep]), 1)[0])
    logger.info("✓ decay fit %s d=%d: slope=%.3f bound slope=%.3f residual=%.3f",
                direction.name, d, slope, bound_slope, residual)
    return DecayFit(direction=direction, radii=starts[keep], envelope=envelope[keep], bound=bound[keep],
                    slope=float(slope), intercept=float(intercept), residual=residual,
                    bound_slope=bound_slope)
