# ============================================================================
# AVERAGING OPERATOR
# ============================================================================
#
# T_t(f, g)(x) = integral over M of f(x - t u) g(x - t v) dmu(u, v)
#              = avg_{u in S^{d-1}} f(x - t u) * avg_{v in N_u} g(x - t v)
#
# Test functions are radial about a center, so every average reduces to polar
# angles. For a sphere of radius B around a point at distance A from the center
# (plus an orthogonal offset sqrt(c0)), the distance at polar angle alpha is
#
#   rho(alpha) = hypot(sqrt(c0 + (A - B)^2), 2 sqrt(A B) sin(alpha / 2))
#
# Composite Gauss-Legendre panels break where rho crosses a characteristic radius
# of the profile and are graded geometrically toward alpha = 0 when the profile is
# singular there.

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from backend.exact_hull import Exponent, HalfPlane, as_fraction, exponent_reciprocal
from backend.sphere_geometry import (SQRT3_2, gauss_legendre, iter_manifold_chunks, make_rng, polar_normalizer,
                                     slice_integral, tangent_basis)
from backend.surface_measure import mu_hat_closed_batch
from models.data_models import (DivergenceLevel, DivergenceReport, FrequencyBatch, MajorizationReport,
                                MaximalDecayFit, MaximalEvaluation, MaximalGrid, MonteCarloEstimate,
                                QuadratureMethod, QuadratureResult, QuadratureSpec)
from models.exceptions import DimensionError, DomainError, FitError, UnboundedFunctionError
from models.test_functions import FunctionKind, TestFunction
from workers.grid_worker import GridWorker, ProgressCallback

logger = logging.getLogger(__name__)

DIVERGENCE_THRESHOLD = 1e6
DIVERGENCE_DEPTHS = (100, 120, 140)
_SMALLEST_ANGLE = 1e-140
_CHUNK = 1 << 16


# ============================================================================
# ARGUMENTS
# ============================================================================

def _as_point(x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise DomainError("x must be a finite vector")
    if x.shape[0] < 3:
        raise DimensionError("triangle averages", x.shape[0], 3)
    return x


def _check_radius(t: float):
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"dilation radius t must be a positive real, got {t}")


def _unit_or_e1(z: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(z))
    if norm == 0.0:
        return np.eye(z.shape[0])[0]
    return z / norm


# ============================================================================
# ANGULAR PANELS
# ============================================================================

def _distance(c0, A, B, angle) -> np.ndarray:
    return np.hypot(np.sqrt(c0 + (A - B) ** 2), 2.0 * np.sqrt(A * B) * np.sin(0.5 * angle))


def angular_panels(c0, A, B, radii: Sequence[float], n: int, power: int,
                   singular_exponent: Optional[float] = None,
                   depth: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss-Legendre rule in alpha on [0, pi] against sin^power / Z, one row per (c0, A, B).

    Every row has the same number of panels; crossings that do not exist become
    zero-width panels at pi, unused grading edges collapse onto the first crossing.
    """
    c0, A, B = np.broadcast_arrays(np.atleast_1d(np.asarray(c0, dtype=float)),
                                   np.atleast_1d(np.asarray(A, dtype=float)),
                                   np.atleast_1d(np.asarray(B, dtype=float)))
    rows = c0.shape[0]
    AB = A * B
    base = c0 + (A - B) ** 2

    crossings = []
    with np.errstate(divide="ignore", invalid="ignore"):
        for r in radii:
            s2 = (r * r - base) / (4.0 * AB)
            valid = (AB > 0) & (s2 > 0) & (s2 < 1)
            crossings.append(np.where(valid, 2.0 * np.arcsin(np.sqrt(np.where(valid, s2, 0.0))), math.pi))
    crossings = np.column_stack(crossings) if crossings else np.empty((rows, 0))
    edges = [np.zeros((rows, 1)), crossings, np.full((rows, 1), math.pi)]

    if singular_exponent is not None and depth > 0 and len(radii):
        root = np.sqrt(AB)
        safe_root = np.where(root > 0, root, 1.0)
        rho0 = np.sqrt(base)
        first = np.min(crossings, axis=1)
        active = (root > 0) & (rho0 < min(radii))
        stop = np.maximum.reduce([first * 10.0**-depth, np.full(rows, _SMALLEST_ANGLE),
                                  1e-3 * rho0 / safe_root])
        if singular_exponent > 0:
            # Below this angle the profile itself overflows.
            stop = np.maximum(stop, 10.0 ** (-300.0 / singular_exponent) / safe_root)
        grades = first[:, None] * 10.0 ** -np.arange(1, depth + 1, dtype=float)[None, :]
        grades = np.maximum(grades, stop[:, None])
        edges.append(np.where(active[:, None], grades, first[:, None]))

    edges = np.clip(np.sort(np.concatenate(edges, axis=1), axis=1), 0.0, math.pi)
    lo = edges[:, :-1]
    half = 0.5 * (edges[:, 1:] - lo)
    x, w = gauss_legendre(n, -1.0, 1.0)
    nodes = lo[..., None] + half[..., None] * (x + 1.0)
    weights = half[..., None] * w * np.sin(nodes) ** power / polar_normalizer(power)
    return nodes.reshape(rows, -1), weights.reshape(rows, -1)


def _singular_exponent(f: TestFunction) -> Optional[float]:
    return f.exponent if f.is_singular else None


def _outer_rule(f: TestFunction, A: float, t: float, d: int):
    """Polar rule in the angle between u and x - center(f)"""
    radii = f.characteristic_radii()
    singular = _singular_exponent(f)

    def rule(quad: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
        nodes, weights = angular_panels(0.0, A, t, radii, quad.n_radial, d - 2, singular, quad.grading_depth)
        return nodes[0], weights[0]
    return rule


def _single_direction(d: int):
    """One node on S^{d-2}, exact when the integrand only depends on the polar angle"""
    def rule(quad: QuadratureSpec, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        return np.eye(d - 1)[:1], np.ones(1)
    return rule


def _coplanar_rule(d: int, axis: np.ndarray, offset: np.ndarray):
    """
    Rule on S^{d-2} for integrands that depend on u only through u.axis and u.offset
    (offset a unit vector orthogonal to axis): Gauss-Legendre in the angle beta to the offset.
    """
    basis = tangent_basis(axis)
    e = basis @ offset
    e /= np.linalg.norm(e)
    e_perp = tangent_basis(e)[0]

    def rule(quad: QuadratureSpec, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        beta, w = gauss_legendre(quad.n_outer, 0.0, math.pi)
        w = w * np.sin(beta) ** (d - 3)
        w /= w.sum()
        omegas = np.cos(beta)[:, None] * e[None, :] + np.sin(beta)[:, None] * e_perp[None, :]
        return omegas, w
    return rule


# ============================================================================
# SPHERICAL AND FIBER AVERAGES
# ============================================================================

def spherical_average(f: TestFunction, x, t: float, quad: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """S_t|f|(x): average of |f(x - t w)| over the unit sphere"""
    x = _as_point(x)
    _check_radius(t)
    quad = quad or QuadratureSpec()
    d = x.shape[0]
    z = x - f.center_array(d)
    return slice_integral(lambda u: np.abs(f(x - t * u)), d, quad, axis=_unit_or_e1(z),
                          polar_rule=_outer_rule(f, float(np.linalg.norm(z)), t, d),
                          inner_rule=_single_direction(d))


def fiber_average(g: TestFunction, x, t: float, u: np.ndarray, quad: Optional[QuadratureSpec] = None) -> np.ndarray:
    """
    Average of g(x - t v) over v in N_u for each row u.

    With y = x - center(g) - (t/2) u the fiber is a (d-2)-sphere of radius sqrt(3)/2 t around y
    in the hyperplane normal to u, so only (y.u)^2 and |P y| enter.
    """
    quad = quad or QuadratureSpec()
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if g.is_constant:
        return np.full(u.shape[0], float(g.value))
    x = np.asarray(x, dtype=float)
    d = u.shape[1]
    y = (x - g.center_array(d))[None, :] - 0.5 * t * u
    along = np.sum(y * u, axis=1)
    c0 = along**2
    A = np.linalg.norm(y - along[:, None] * u, axis=1)
    B = SQRT3_2 * t
    nodes, weights = angular_panels(c0, A, B, g.characteristic_radii(), quad.n_inner, d - 3,
                                    _singular_exponent(g), quad.grading_depth)
    rho = _distance(c0[:, None], A[:, None], B, nodes)
    return np.sum(g.profile(rho) * weights, axis=1)


# ============================================================================
# TRIANGLE AVERAGES
# ============================================================================

def _apply_product(f: TestFunction, g: TestFunction, x: np.ndarray, t: float,
                   quad: QuadratureSpec) -> QuadratureResult:
    d = x.shape[0]
    if f.is_constant and not g.is_constant:
        # The manifold measure is symmetric under (u, v) -> (v, u).
        f, g = g, f
    z_f = x - f.center_array(d)
    axis = _unit_or_e1(z_f)
    z_g = x - g.center_array(d)
    offset = z_g - np.dot(z_g, axis) * axis
    offset_norm = float(np.linalg.norm(offset))
    if g.is_constant or offset_norm <= 1e-12 * max(1.0, float(np.linalg.norm(z_g))):
        inner = _single_direction(d)
    else:
        inner = _coplanar_rule(d, axis, offset / offset_norm)
    polar = _outer_rule(f, float(np.linalg.norm(z_f)), t, d)

    def run(fiber_quad: QuadratureSpec) -> QuadratureResult:
        return slice_integral(lambda u: f(x - t * u) * fiber_average(g, x, t, u, fiber_quad), d, quad,
                              axis=axis, polar_rule=polar, inner_rule=inner)

    result = run(quad)
    if g.is_constant:
        return result
    coarse = run(quad.halved())
    return QuadratureResult(value=result.value, error=max(result.error, abs(result.value - coarse.value)),
                            n_nodes=result.n_nodes, method=result.method)


def _apply_monte_carlo(f: TestFunction, g: TestFunction, x: np.ndarray, t: float,
                       quad: QuadratureSpec) -> QuadratureResult:
    n = quad.n_samples
    rng = make_rng(quad.seed)
    total = 0.0
    total_sq = 0.0
    for u, v in iter_manifold_chunks(rng, x.shape[0], n):
        values = f(x - t * u) * g(x - t * v)
        total += float(values.sum())
        total_sq += float(np.dot(values, values))
    mean = total / n
    variance = max(0.0, (total_sq - n * mean * mean) / (n - 1)) if n > 1 else 0.0
    return QuadratureResult(value=mean, error=math.sqrt(variance / n), n_nodes=n,
                            method=QuadratureMethod.MONTE_CARLO.value)


def apply_T(f: TestFunction, g: TestFunction, x, t: float, quad: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """
    T_t(f, g)(x). The product method slices S^{d-1} and averages g over each fiber N_u;
    its error is the difference from the half-resolution rule. The Monte Carlo method
    averages over manifold samples and reports the standard error.
    """
    x = _as_point(x)
    _check_radius(t)
    quad = quad or QuadratureSpec()
    if quad.method is QuadratureMethod.MONTE_CARLO:
        return _apply_monte_carlo(f, g, x, t, quad)
    return _apply_product(f, g, x, t, quad)


def apply_T_fourier(f: TestFunction, g: TestFunction, x, t: float = 1.0, n_samples: int = 200_000,
                    seed: int = 0, n_radial: Optional[int] = None) -> MonteCarloEstimate:
    """
    T_t(f, g)(x) on the frequency side for gaussian f and g:
    integral of mu_hat(t xi, t eta) f^(xi) g^(eta) exp(2 pi i x.(xi + eta)),
    sampling xi and eta from the normalized gaussian transforms.
    """
    if f.kind != FunctionKind.GAUSSIAN or g.kind != FunctionKind.GAUSSIAN:
        raise DomainError("apply_T_fourier needs gaussian test functions")
    x = _as_point(x)
    _check_radius(t)
    if n_samples < 2:
        raise DomainError("n_samples must be >= 2")
    d = x.shape[0]
    sigma_f = 1.0 / (math.sqrt(2.0 * math.pi) * f.width * f.scale)
    sigma_g = 1.0 / (math.sqrt(2.0 * math.pi) * g.width * g.scale)
    shift_f = x - f.center_array(d)
    shift_g = x - g.center_array(d)
    rng = make_rng(seed)
    sums = np.zeros(4)
    remaining = n_samples
    while remaining > 0:
        size = min(_CHUNK, remaining)
        xi = sigma_f * rng.standard_normal((size, d))
        eta = sigma_g * rng.standard_normal((size, d))
        m = mu_hat_closed_batch(FrequencyBatch.from_vectors(t * xi, t * eta), n_radial)
        phase = 2.0 * math.pi * (xi @ shift_f + eta @ shift_g)
        c = m * np.cos(phase)
        s = m * np.sin(phase)
        sums += (c.sum(), s.sum(), np.dot(c, c), np.dot(s, s))
        remaining -= size
    mean_c = sums[0] / n_samples
    mean_s = sums[1] / n_samples
    var_c = max(0.0, (sums[2] - n_samples * mean_c**2) / (n_samples - 1))
    var_s = max(0.0, (sums[3] - n_samples * mean_s**2) / (n_samples - 1))
    return MonteCarloEstimate(value=complex(mean_c, mean_s), se_real=math.sqrt(var_c / n_samples),
                              se_imag=math.sqrt(var_s / n_samples), n_samples=n_samples)


# ============================================================================
# MAXIMAL OPERATOR
# ============================================================================

def maximal_T(f: TestFunction, g: TestFunction, x, grid: MaximalGrid, quad: Optional[QuadratureSpec] = None,
              max_workers: Optional[int] = None,
              progress: Optional[ProgressCallback] = None) -> MaximalEvaluation:
    """max over the grid radii of |T_t(f, g)(x)|, a lower bound for the supremum over t > 0"""
    x = _as_point(x)
    quad = quad or QuadratureSpec()
    radii = grid.values()
    worker = GridWorker(max_workers=max_workers, progress=progress, label="maximal")
    results = worker.map(lambda t: apply_T(f, g, x, float(t), quad), radii)
    evaluation = MaximalEvaluation(
        x=tuple(float(c) for c in x),
        radii=radii,
        values=np.array([r.value for r in results]),
        errors=np.array([r.error for r in results]),
    )
    logger.debug("maximal T at |x|=%.6g: %.6g (t*=%.6g)", float(np.linalg.norm(x)), evaluation.value,
                 evaluation.t_star)
    return evaluation


def counterexample_exponent(d: int, p: Exponent, q: Exponent) -> float:
    """-d (1 + 1/q - 1/p), the decay rate of the maximal operator on the counterexample pair"""
    return float(-d * (1 + exponent_reciprocal(q) - exponent_reciprocal(p)))


def divergence_levels(f: TestFunction, g: TestFunction, x, grid: MaximalGrid,
                      quad: Optional[QuadratureSpec] = None, depths: Sequence[int] = DIVERGENCE_DEPTHS,
                      threshold: float = DIVERGENCE_THRESHOLD,
                      max_workers: Optional[int] = None) -> DivergenceReport:
    """
    Maximal values at successive refinements: level n refines the radius grid n times
    (keeping every earlier radius) and grades the angular panels `depths[n]` decades deep.
    """
    quad = quad or QuadratureSpec()
    levels = []
    current = grid
    for level, depth in enumerate(depths):
        evaluation = maximal_T(f, g, x, current, quad.with_depth(depth), max_workers=max_workers)
        levels.append(DivergenceLevel(level=level, n_t=current.n_t, grading_depth=depth,
                                      value=evaluation.value, t_star=evaluation.t_star))
        current = current.refined()
    report = DivergenceReport(levels=levels, threshold=threshold)
    values = ", ".join(f"{level.value:.3g}" for level in levels)
    marker = "✓" if report.diverges else "⚠️"
    logger.info("%s divergence levels: %s", marker, values)
    return report


def fit_maximal_decay(d: int, p: Exponent, q: Exponent, radii: Optional[Sequence[float]] = None,
                      quad: Optional[QuadratureSpec] = None, decades: float = 0.5, per_decade: int = 16,
                      max_workers: Optional[int] = None) -> MaximalDecayFit:
    """Log-log slope of the maximal operator on the counterexample pair along x = R e1"""
    f = TestFunction.counterexample_f(d, float(as_fraction(p)))
    g = TestFunction.counterexample_g(d, float(as_fraction(q)))
    radii = np.asarray(radii if radii is not None else np.geomspace(10.0, 100.0, 7), dtype=float)
    quad = quad or QuadratureSpec()
    values = []
    t_stars = []
    for R in radii:
        x = np.zeros(d)
        x[0] = R
        evaluation = maximal_T(f, g, x, MaximalGrid.anchored(float(R), decades, per_decade), quad,
                               max_workers=max_workers)
        values.append(evaluation.value)
        t_stars.append(evaluation.t_star)
    values = np.array(values)
    if len(radii) < 2 or np.any(values <= 0):
        raise FitError("maximal decay fit needs at least two radii with positive values")
    slope, intercept = np.polyfit(np.log(radii), np.log(values), 1)
    fit = MaximalDecayFit(radii=radii, values=values, t_stars=np.array(t_stars), slope=float(slope),
                          intercept=float(intercept), expected=counterexample_exponent(d, p, q))
    logger.info("✓ maximal decay fit: slope=%.3f expected=%.3f", fit.slope, fit.expected)
    return fit


# ============================================================================
# MAJORIZATION AND REGIONS
# ============================================================================

def majorization_check(f: TestFunction, g: TestFunction, x, t: float,
                       quad: Optional[QuadratureSpec] = None) -> MajorizationReport:
    """|T_t(f, g)(x)| <= ||g||_inf S_t|f|(x), and <= ||f||_inf S_t|g|(x) when f is bounded"""
    if not g.is_bounded:
        raise UnboundedFunctionError(f"majorization needs a bounded g, got {g.to_spec()}")
    quad = quad or QuadratureSpec()
    product = apply_T(f, g, x, t, quad)
    average = spherical_average(f, x, t, quad)
    g_sup = g.sup_norm()
    report = MajorizationReport(lhs=abs(product.value), lhs_error=product.error,
                                rhs=g_sup * average.value, rhs_error=g_sup * average.error)
    if f.is_bounded:
        f_sup = f.sup_norm()
        other = spherical_average(g, x, t, quad)
        report.symmetric_rhs = f_sup * other.value
        report.symmetric_error = f_sup * other.error
    return report


@dataclass(frozen=True)
class MaximalRegion:
    """
    Exponent regions for the maximal operator in (1/p, 1/q):
    interpolated  hull of (0,0), (0,(d-1)/d), ((d-1)/d,0) without its upper-right edge
    necessary     the square [0, (d-1)/d)^2
    """
    d: int
    interpolated: Tuple[HalfPlane, ...]
    necessary: Tuple[HalfPlane, ...]

    @staticmethod
    def _inside(planes: Tuple[HalfPlane, ...], x, y) -> bool:
        x, y = as_fraction(x), as_fraction(y)
        return all(plane.holds(x, y) for plane in planes)

    def contains_interpolated(self, x, y) -> bool:
        return self._inside(self.interpolated, x, y)

    def contains_necessary(self, x, y) -> bool:
        return self._inside(self.necessary, x, y)

    def classify(self, p: Exponent, q: Exponent) -> dict:
        x, y = exponent_reciprocal(p), exponent_reciprocal(q)
        return {"inv_p": str(x), "inv_q": str(y), "interpolated": self.contains_interpolated(x, y),
                "necessary": self.contains_necessary(x, y)}

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "interpolated": [plane.to_dict() for plane in self.interpolated],
            "necessary": [plane.to_dict() for plane in self.necessary],
        }


def maximal_region(d: int) -> MaximalRegion:
    if int(d) != d or d < 2:
        raise DimensionError("maximal_region", d, 2)
    edge = Fraction(d - 1, d)
    zero, one = Fraction(0), Fraction(1)
    quadrant = (HalfPlane(-one, zero, zero), HalfPlane(zero, -one, zero))
    return MaximalRegion(
        d=int(d),
        interpolated=quadrant + (HalfPlane(one, one, edge, strict=True),),
        necessary=quadrant + (HalfPlane(one, zero, edge, strict=True), HalfPlane(zero, one, edge, strict=True)),
    )
