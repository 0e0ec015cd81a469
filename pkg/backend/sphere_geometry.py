# ============================================================================
# SPHERE GEOMETRY
# ============================================================================
#
# Haar rotations, uniform samples on spheres and on the triangle manifold
#   M = {(u, v) : |u| = |v| = |u - v| = 1},
# the fiber N_u of admissible third vertices, and quadrature on S^{d-1} by slicing
# along an axis (polar angle alpha, then S^{d-2}).

import logging
import math
from functools import lru_cache
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, roots_legendre

from models.data_models import ManifoldSample, QuadratureMethod, QuadratureResult, QuadratureSpec, Rotation
from models.exceptions import DimensionError, DomainError

logger = logging.getLogger(__name__)

SQRT3_2 = math.sqrt(3.0) / 2.0
_CHUNK = 1 << 16

PolarRule = Callable[[QuadratureSpec], Tuple[np.ndarray, np.ndarray]]
InnerRule = Callable[[QuadratureSpec, np.random.Generator], Tuple[np.ndarray, np.ndarray]]


# ============================================================================
# RANDOM STREAMS
# ============================================================================

def make_rng(seed: Union[int, Sequence[int]]) -> np.random.Generator:
    """PCG64 generator seeded through a SeedSequence; a tuple seed keys a substream"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """Independent substreams derived from one seed"""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


# ============================================================================
# ROTATIONS AND MANIFOLD SAMPLES
# ============================================================================

def _check_dimension(operation: str, d: int, minimum: int = 2):
    if int(d) != d or d < minimum:
        raise DimensionError(operation, d, minimum)


def haar_rotation_batch(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    """n Haar-distributed rotations as an (n, d, d) array"""
    _check_dimension("haar_rotation", d)
    out = np.empty((n, d, d))
    filled = 0
    while filled < n:
        gauss = rng.standard_normal((n - filled, d, d))
        q, r = np.linalg.qr(gauss)
        diag = np.diagonal(r, axis1=1, axis2=2)
        good = np.all(np.abs(diag) > 1e-12, axis=1)
        q = q[good] * np.sign(diag[good])[:, None, :]
        flip = np.linalg.det(q) < 0
        q[flip, :, -1] *= -1.0
        out[filled:filled + len(q)] = q
        filled += len(q)
    return out


def haar_rotation(rng: np.random.Generator, d: int) -> Rotation:
    """Haar-distributed element of SO(d): QR of a Gaussian matrix with sign corrections"""
    return Rotation(haar_rotation_batch(rng, d, 1)[0])


def sample_manifold(rng: np.random.Generator, d: int) -> ManifoldSample:
    """(R e1, R (e1/2 + sqrt(3)/2 e2)) for Haar-distributed R"""
    rotation = haar_rotation(rng, d).matrix
    u = rotation[:, 0]
    v = 0.5 * rotation[:, 0] + SQRT3_2 * rotation[:, 1]
    return ManifoldSample(u, v)


def sample_manifold_batch(rng: np.random.Generator, d: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    n samples of the manifold measure as (n, d) arrays u, v.

    Same law as sample_manifold: for d >= 3 the first two columns of a Haar rotation are
    Gram-Schmidt on two Gaussian vectors; for d = 2 the second column is the first turned by +90 degrees.
    """
    _check_dimension("sample_manifold", d)
    first = rng.standard_normal((n, d))
    u = first / np.linalg.norm(first, axis=1, keepdims=True)
    if d == 2:
        w = np.stack([-u[:, 1], u[:, 0]], axis=1)
    else:
        second = rng.standard_normal((n, d))
        w = second - np.sum(second * u, axis=1, keepdims=True) * u
        w /= np.linalg.norm(w, axis=1, keepdims=True)
    return u, 0.5 * u + SQRT3_2 * w


def iter_manifold_chunks(rng: np.random.Generator, d: int, n: int,
                         chunk: int = _CHUNK) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """sample_manifold_batch in pieces of at most `chunk` samples"""
    remaining = n
    while remaining > 0:
        size = min(chunk, remaining)
        yield sample_manifold_batch(rng, d, size)
        remaining -= size


def uniform_sphere(rng: np.random.Generator, n: int, ambient: int) -> np.ndarray:
    """n uniform points on S^{ambient-1}"""
    if ambient == 1:
        return rng.choice(np.array([-1.0, 1.0]), size=(n, 1))
    points = rng.standard_normal((n, ambient))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


# ============================================================================
# FIBERS
# ============================================================================

def _as_unit(u, label: str = "u") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise DomainError(f"{label} must be a vector")
    norm = np.linalg.norm(u)
    if abs(norm - 1.0) > 1e-8:
        raise DomainError(f"{label} must be a unit vector, |{label}| = {norm!r}")
    return u / norm


def tangent_basis(u) -> np.ndarray:
    """
    Orthonormal basis of the hyperplane normal to u, as the rows of a (d-1, d) array.

    Columns 2..d of the Householder reflection sending e1 to u (to -u when u1 < 0).
    """
    u = _as_unit(u)
    d = u.shape[0]
    w = -u.copy() if u[0] >= 0 else u.copy()
    w[0] += 1.0
    size = float(np.dot(w, w))
    reflection = np.eye(d)
    if size > 1e-30:
        reflection -= (2.0 / size) * np.outer(w, w)
    return reflection[:, 1:].T.copy()


def fiber_points(u, omegas: np.ndarray) -> np.ndarray:
    """v = u/2 + sqrt(3)/2 * sum_i omega_i w_i for each row omega"""
    u = _as_unit(u)
    basis = tangent_basis(u)
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    if omegas.shape[1] != u.shape[0] - 1:
        raise DomainError("omega must live in R^{d-1}")
    return 0.5 * u + SQRT3_2 * (omegas @ basis)


def fiber_point(u, omega) -> np.ndarray:
    """Point of N_u addressed by a unit vector omega of R^{d-1}"""
    omega = _as_unit(omega, "omega")
    return fiber_points(u, omega[None, :])[0]


# ============================================================================
# QUADRATURE RULES
# ============================================================================

def gauss_legendre(n: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre rule on [a, b]"""
    nodes, weights = _legendre(int(n))
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights


@lru_cache(maxsize=256)
def _legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def polar_normalizer(power: int) -> float:
    """Integral of sin^power over [0, pi]"""
    return math.exp(0.5 * math.log(math.pi) + gammaln(0.5 * (power + 1)) - gammaln(0.5 * power + 1.0))


@lru_cache(maxsize=64)
def sphere_rule(ambient: int, n_polar: int, n_azimuth: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Product rule on S^{ambient-1}: Gauss-Legendre in each polar angle, equispaced on the last circle.

    Returns (points, weights) with weights summing to 1.
    """
    if ambient < 1:
        raise DomainError("sphere_rule needs ambient dimension >= 1")
    if ambient == 1:
        return np.array([[1.0], [-1.0]]), np.array([0.5, 0.5])
    if ambient == 2:
        angles = 2.0 * math.pi * (np.arange(n_azimuth) + 0.5) / n_azimuth
        return np.stack([np.cos(angles), np.sin(angles)], axis=1), np.full(n_azimuth, 1.0 / n_azimuth)
    alpha, w = gauss_legendre(n_polar, 0.0, math.pi)
    w = w * np.sin(alpha) ** (ambient - 2)
    w /= w.sum()
    sub_points, sub_weights = sphere_rule(ambient - 1, n_polar, n_azimuth)
    points = np.concatenate([
        np.repeat(np.cos(alpha), len(sub_weights))[:, None],
        (np.sin(alpha)[:, None, None] * sub_points[None, :, :]).reshape(-1, ambient - 1),
    ], axis=1)
    weights = np.outer(w, sub_weights).ravel()
    return points, weights


def mirrored_polar_rule(d: int) -> PolarRule:
    """Gauss-Legendre in phi on [0, pi/2], used at alpha = phi and pi - phi (r = sin phi)"""
    def rule(quad: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
        phi, w = gauss_legendre(quad.n_radial, 0.0, 0.5 * math.pi)
        w = w * np.sin(phi) ** (d - 2)
        w = 0.5 * w / w.sum()
        return np.concatenate([phi, math.pi - phi]), np.concatenate([w, w])
    return rule


def default_inner_rule(d: int) -> InnerRule:
    """Product rule or Monte Carlo on S^{d-2}, following quad.method"""
    def rule(quad: QuadratureSpec, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        if quad.method is QuadratureMethod.MONTE_CARLO:
            points = uniform_sphere(rng, quad.n_outer, d - 1)
            return points, np.full(quad.n_outer, 1.0 / quad.n_outer)
        return sphere_rule(d - 1, quad.n_radial, quad.n_outer)
    return rule


def _slice_sum(f, axis: np.ndarray, alpha: np.ndarray, alpha_weights: np.ndarray,
               omegas: np.ndarray, omega_weights: np.ndarray):
    basis = tangent_basis(axis)
    directions = omegas @ basis
    per_chunk = max(1, _CHUNK // max(1, len(omega_weights)))
    total = 0.0
    for start in range(0, len(alpha), per_chunk):
        a = alpha[start:start + per_chunk]
        wa = alpha_weights[start:start + per_chunk]
        points = (np.cos(a)[:, None, None] * axis[None, None, :]
                  + np.sin(a)[:, None, None] * directions[None, :, :])
        values = np.asarray(f(points.reshape(-1, axis.shape[0]))).reshape(len(a), len(omega_weights))
        total = total + wa @ values @ omega_weights
    return total


def slice_integral(f: Callable[[np.ndarray], np.ndarray], d: int, quad: Optional[QuadratureSpec] = None,
                   rng: Optional[np.random.Generator] = None, axis=None,
                   polar_rule: Optional[PolarRule] = None,
                   inner_rule: Optional[InnerRule] = None) -> QuadratureResult:
    """
    Normalized integral of f over S^{d-1} by slicing along `axis` (default e1).

    f maps an (N, d) array of sphere points to N values (real or complex). The polar angle uses
    r = sin(phi), so the slice weight becomes sin^{d-2}; the S^{d-2} factor uses a product rule or
    Monte Carlo. The error estimate is the difference from the same rule at half resolution.
    """
    _check_dimension("slice_integral", d, 3)
    quad = quad or QuadratureSpec()
    rng = rng if rng is not None else make_rng(quad.seed)
    if axis is None:
        axis = np.eye(d)[0]
    axis = _as_unit(axis, "axis")
    if axis.shape[0] != d:
        raise DomainError("axis dimension does not match d")
    polar_rule = polar_rule or mirrored_polar_rule(d)
    inner_rule = inner_rule or default_inner_rule(d)

    full_rng, half_rng = rng.spawn(2)
    estimates = []
    for spec, stream in ((quad, full_rng), (quad.halved(), half_rng)):
        alpha, alpha_weights = polar_rule(spec)
        omegas, omega_weights = inner_rule(spec, stream)
        estimates.append(_slice_sum(f, axis, alpha, alpha_weights, omegas, omega_weights))
        if len(estimates) == 1:
            n_nodes = len(alpha) * len(omega_weights)
    value, coarse = estimates
    error = float(abs(value - coarse))
    logger.debug("slice_integral d=%d nodes=%d error=%.3e", d, n_nodes, error)
    return QuadratureResult(value=value, error=error, n_nodes=n_nodes, method=quad.method.value)
