# ============================================================================
# DECOMPOSITION
# ============================================================================
#
# Three-level partition of unity of frequency space R^d x R^d:
#
#   phi_i   joint norm |(xi, eta)| ~ 2^i
#   psi_j   ratio min(|xi|, |eta|) / max(|xi|, |eta|) ~ 2^-j      (L = log2|eta| - log2|xi|)
#   rho_k   |sin(theta)| ~ 2^-k                                  (theta = angle between xi and eta)
#
# with tails psi^J (ratio <~ 2^-J) and rho^K (|sin| <~ 2^-K). The piece
# m_{i,j,k} = mu_hat * phi_i * psi_j * rho_k, the volume of its support and the
# norm-bound arithmetic built on it, plus the exact exponent regions.

import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad as integrate
from scipy.special import gammaln, roots_legendre

from backend.exact_hull import Exponent, ExactHull, exponent_reciprocal
from backend.sphere_geometry import make_rng, uniform_sphere
from backend.surface_measure import angular_constant, mu_hat_closed, mu_hat_closed_batch
from models.data_models import DyadicIndex, FrequencyBatch, FrequencyPair, NormBoundRow, NormBoundTable
from models.exceptions import DimensionError, DomainError, InvalidIndexError

logger = logging.getLogger(__name__)

Frequencies = Union[FrequencyPair, FrequencyBatch]

DEFAULT_EPSILON = 0.1


# ============================================================================
# CUTOFF PROFILE
# ============================================================================

def bump(s) -> np.ndarray:
    """exp(-1 / (1 - s^2)) on (-1, 1), zero elsewhere"""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    safe = np.where(inside, s, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0)


class CutoffProfile:
    """
    Smooth step S built from the integrated bump, and the three cutoffs made from it:

        phi0(z)  = 1 - S(z - 1)                            1 on [0, 1], 0 beyond 2
        psi*(t)  = S((t + eps) / eps) * (1 - S((t - 1) / eps))   1 on [0, 1], 0 off [-eps, 1 + eps]
        rho*(t)  = 1 - S(|t| - 1)                          1 on [-1, 1], 0 off [-2, 2]

    The cumulative bump integral is tabulated once on a fine panel grid; each
    evaluation adds one Gauss-Legendre partial panel.
    """

    def __init__(self, epsilon: float = DEFAULT_EPSILON, n_panels: int = 2048, n_gauss: int = 16,
                 mollifier: Callable[[np.ndarray], np.ndarray] = bump):
        if not 0.0 < epsilon < 0.5:
            raise DomainError(f"epsilon must lie in (0, 1/2), got {epsilon}")
        self.epsilon = float(epsilon)
        self.mollifier = mollifier
        self._nodes, self._weights = roots_legendre(n_gauss)
        self._edges = np.linspace(-1.0, 1.0, n_panels + 1)
        self._width = 2.0 / n_panels
        left = self._edges[:-1]
        panel_nodes = left[:, None] + 0.5 * self._width * (self._nodes[None, :] + 1.0)
        panel_areas = 0.5 * self._width * (mollifier(panel_nodes) @ self._weights)
        self._cumulative = np.concatenate([[0.0], np.cumsum(panel_areas)])
        self._total = float(self._cumulative[-1])

    def step(self, t) -> np.ndarray:
        """S(t): 0 for t <= 0, 1 for t >= 1, smooth and increasing between"""
        t = np.asarray(t, dtype=float)
        s = 2.0 * np.clip(t, 0.0, 1.0) - 1.0
        panel = np.clip(np.floor((s + 1.0) / self._width).astype(int), 0, len(self._edges) - 2)
        left = self._edges[panel]
        span = s - left
        nodes = left[..., None] + 0.5 * span[..., None] * (self._nodes + 1.0)
        partial = 0.5 * span * (self.mollifier(nodes) @ self._weights)
        value = (self._cumulative[panel] + partial) / self._total
        value = np.where(t <= 0.0, 0.0, value)
        return np.where(t >= 1.0, 1.0, value)

    def phi0(self, z) -> np.ndarray:
        return 1.0 - self.step(np.asarray(z, dtype=float) - 1.0)

    def psi_star(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        eps = self.epsilon
        return self.step((t + eps) / eps) * (1.0 - self.step((t - 1.0) / eps))

    def rho_star(self, t) -> np.ndarray:
        return 1.0 - self.step(np.abs(np.asarray(t, dtype=float)) - 1.0)

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "n_panels": len(self._edges) - 1, "n_gauss": len(self._nodes)}


DEFAULT_PROFILE = CutoffProfile()


# ============================================================================
# PARTITIONS
# ============================================================================

class _Invariants(NamedTuple):
    norm_xi: np.ndarray
    norm_eta: np.ndarray
    sin_theta: np.ndarray
    joint: np.ndarray
    scalar: bool
    shape: Tuple[int, ...]


def _invariants(fp: Frequencies) -> _Invariants:
    if isinstance(fp, FrequencyPair):
        return _Invariants(np.array([fp.norm_xi]), np.array([fp.norm_eta]), np.array([fp.sin_theta]),
                           np.array([fp.joint_norm]), True, ())
    shape = np.shape(fp.norm_xi)
    return _Invariants(np.ravel(fp.norm_xi), np.ravel(fp.norm_eta), np.ravel(fp.sin_theta),
                       np.ravel(fp.joint_norm), False, shape)


def _finish(values: np.ndarray, inv: _Invariants):
    return float(values[0]) if inv.scalar else values.reshape(inv.shape)


def _check_scale(label: str, n: int):
    if int(n) != n or n < 0:
        raise InvalidIndexError(f"{label} must be a nonnegative integer, got {n}")


def _log_ratio(inv: _Invariants) -> np.ndarray:
    """log2|eta| - log2|xi|: 0 when both vanish, +-inf when one does"""
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.log2(inv.norm_eta) - np.log2(inv.norm_xi)
    both_zero = (inv.norm_xi == 0) & (inv.norm_eta == 0)
    return np.where(both_zero, 0.0, L)


def _ratio_window(L: np.ndarray, profile: CutoffProfile) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three shifts m that can carry psi*(L - m), their values, and the normalizing sum"""
    finite = np.isfinite(L)
    safe = np.where(finite, L, 0.0)
    shifts = np.floor(safe)[:, None] + np.array([-1.0, 0.0, 1.0])[None, :]
    values = profile.psi_star(safe[:, None] - shifts)
    return shifts, values, values.sum(axis=1)


def phi(i: int, fp: Frequencies, profile: CutoffProfile = DEFAULT_PROFILE):
    """Joint-norm cutoff: phi0(z) for i = 0, phi0(z / 2^i) - phi0(z / 2^(i-1)) otherwise"""
    _check_scale("i", i)
    inv = _invariants(fp)
    z = inv.joint
    if i == 0:
        values = profile.phi0(z)
    else:
        values = profile.phi0(z / 2.0**i) - profile.phi0(z / 2.0 ** (i - 1))
    return _finish(values, inv)


def psi(j: int, fp: Frequencies, profile: CutoffProfile = DEFAULT_PROFILE):
    """Ratio cutoff psi*_j(L) + psi*_{-j-1}(L); zero on the axes"""
    _check_scale("j", j)
    inv = _invariants(fp)
    L = _log_ratio(inv)
    shifts, values, total = _ratio_window(L, profile)
    chosen = (shifts == j) | (shifts == -j - 1)
    values = np.sum(np.where(chosen, values, 0.0), axis=1) / total
    return _finish(np.where(np.isfinite(L), values, 0.0), inv)


def psi_upper(j: int, fp: Frequencies, profile: CutoffProfile = DEFAULT_PROFILE):
    """Ratio tail sum_{m >= j} psi_m, identically 1 where the ratio is <= 2^(-eps) 2^(-j)"""
    _check_scale("j", j)
    inv = _invariants(fp)
    L = _log_ratio(inv)
    shifts, values, total = _ratio_window(L, profile)
    chosen = (shifts >= j) | (shifts <= -j - 1)
    values = np.sum(np.where(chosen, values, 0.0), axis=1) / total
    return _finish(np.where(np.isfinite(L), values, 1.0), inv)


def rho(k: int, fp: Frequencies, profile: CutoffProfile = DEFAULT_PROFILE):
    """Angle cutoff: 1 - rho*(4 s) for k = 0, rho*(4^k s) - rho*(4^(k+1) s) otherwise, s = sin^2"""
    _check_scale("k", k)
    inv = _invariants(fp)
    s = inv.sin_theta**2
    if k == 0:
        values = 1.0 - profile.rho_star(4.0 * s)
    else:
        values = profile.rho_star(4.0**k * s) - profile.rho_star(4.0 ** (k + 1) * s)
    return _finish(values, inv)


def rho_upper(k: int, fp: Frequencies, profile: CutoffProfile = DEFAULT_PROFILE):
    """Angle tail rho*(4^k sin^2), identically 1 where |sin| <= 2^-k and at sin = 0"""
    _check_scale("k", k)
    inv = _invariants(fp)
    return _finish(profile.rho_star(4.0**k * inv.sin_theta**2), inv)


# ============================================================================
# PIECES
# ============================================================================

def _index(idx) -> DyadicIndex:
    if isinstance(idx, DyadicIndex):
        return idx
    return DyadicIndex(*idx)


def piece_weight(idx, fp: Frequencies, profile: CutoffProfile = DEFAULT_PROFILE):
    """phi_i times the ratio and angle factors of piece (i, j, k); pieces at fixed i sum to phi_i"""
    idx = _index(idx)
    ratio = psi_upper if idx.is_ratio_tail else psi
    weight = np.asarray(phi(idx.i, fp, profile)) * np.asarray(ratio(idx.j, fp, profile))
    if idx.j < idx.i:
        angle = rho_upper if idx.is_angle_tail else rho
        weight = weight * np.asarray(angle(idx.k, fp, profile))
    return float(weight) if isinstance(fp, FrequencyPair) else weight


def m_piece(idx, fp: Frequencies, profile: CutoffProfile = DEFAULT_PROFILE,
            n_radial: Optional[int] = None):
    """m_{i,j,k}(xi, eta) = mu_hat * piece weight"""
    weight = piece_weight(idx, fp, profile)
    if isinstance(fp, FrequencyPair):
        if weight == 0.0:
            return complex(0.0)
        return complex(mu_hat_closed(fp, n_radial) * weight)
    return (mu_hat_closed_batch(fp, n_radial) * weight).astype(complex)


def in_piece_support(idx, fp: Frequencies, epsilon: float = DEFAULT_EPSILON):
    """Open set outside which piece (i, j, k) vanishes identically"""
    idx = _index(idx)
    inv = _invariants(fp)
    z = inv.joint
    if idx.i == 0:
        inside = z < 2.0
    else:
        inside = (z > 2.0 ** (idx.i - 1)) & (z < 2.0 ** (idx.i + 1))

    big = np.maximum(inv.norm_xi, inv.norm_eta)
    ratio = np.where(big > 0, np.minimum(inv.norm_xi, inv.norm_eta) / np.where(big > 0, big, 1.0), 1.0)
    if idx.is_ratio_tail:
        if idx.i >= 1:
            inside &= ratio < 2.0 ** (epsilon - idx.j)
    else:
        inside &= (ratio > 2.0 ** (-idx.j - 1 - epsilon)) & (ratio < 2.0 ** (epsilon - idx.j))

    if idx.j < idx.i:
        sin = inv.sin_theta
        ceiling = math.sqrt(2.0) * 2.0**-idx.k
        if idx.is_angle_tail:
            inside &= sin < ceiling
        elif idx.k == 0:
            inside &= sin > 0.5
        else:
            inside &= (sin > 2.0 ** (-idx.k - 1)) & (sin < ceiling)
    return bool(inside[0]) if inv.scalar else inside.reshape(inv.shape)


def sample_piece_support(idx, d: int, n: int, rng: np.random.Generator,
                         epsilon: float = DEFAULT_EPSILON) -> Tuple[np.ndarray, np.ndarray]:
    """
    n pairs (xi, eta) drawn inside the support box of a piece, as (n, d) arrays.

    Joint norm, ratio and |sin| are drawn log-uniformly in their bands, the
    larger frequency is xi or eta with equal probability.
    """
    idx = _index(idx)
    if d < 2:
        raise DimensionError("sample_piece_support", d, 2)
    z_lo, z_hi = (1.0, 2.0) if idx.i == 0 else (2.0 ** (idx.i - 1), 2.0 ** (idx.i + 1))
    z = np.exp(rng.uniform(math.log(z_lo), math.log(z_hi), n))

    r_hi = min(1.0, 2.0 ** (epsilon - idx.j))
    r_lo = 2.0 ** (-idx.j - 1 - epsilon) if not idx.is_ratio_tail else r_hi * 2.0**-6
    r = np.exp(rng.uniform(math.log(r_lo), math.log(r_hi), n))

    if idx.j >= idx.i:
        s_lo, s_hi = 2.0**-8, 1.0
    elif idx.is_angle_tail:
        s_lo, s_hi = 2.0 ** (-idx.k - 6), min(1.0, math.sqrt(2.0) * 2.0**-idx.k)
    elif idx.k == 0:
        s_lo, s_hi = 0.5, 1.0
    else:
        s_lo, s_hi = 2.0 ** (-idx.k - 1), min(1.0, math.sqrt(2.0) * 2.0**-idx.k)
    sin = np.exp(rng.uniform(math.log(s_lo), math.log(s_hi), n))
    cos = np.sqrt(1.0 - sin * sin) * rng.choice([-1.0, 1.0], n)

    big = z / np.sqrt(1.0 + r * r)
    small = r * big
    xi_is_big = rng.random(n) < 0.5
    norm_xi = np.where(xi_is_big, big, small)
    norm_eta = np.where(xi_is_big, small, big)
    xi = np.zeros((n, d))
    eta = np.zeros((n, d))
    eta[:, 0] = norm_eta
    xi[:, 0] = norm_xi * cos
    xi[:, 1] = norm_xi * sin
    return xi, eta


_PARTITIONS = {"phi": phi, "psi": psi, "psi_upper": psi_upper, "rho": rho, "rho_upper": rho_upper}


def partition_gradient(kind: str, n: int, xi: np.ndarray, eta: np.ndarray, rel_step: float = 1e-6,
                       profile: CutoffProfile = DEFAULT_PROFILE) -> np.ndarray:
    """Euclidean norm of the central finite-difference gradient in R^{2d}, one value per row"""
    if kind not in _PARTITIONS:
        raise DomainError(f"unknown partition {kind!r}; expected one of {sorted(_PARTITIONS)}")
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    rows, d = xi.shape
    points = np.concatenate([xi, eta], axis=1)
    h = rel_step * np.maximum(1.0, np.linalg.norm(points, axis=1))
    shifts = np.eye(2 * d)[None, :, :] * h[:, None, None]
    stacked = np.concatenate([points[:, None, :] + shifts, points[:, None, :] - shifts], axis=1)
    flat = stacked.reshape(-1, 2 * d)
    values = np.asarray(_PARTITIONS[kind](n, FrequencyBatch.from_vectors(flat[:, :d], flat[:, d:]), profile))
    values = values.reshape(rows, 2, 2 * d)
    grad = (values[:, 0, :] - values[:, 1, :]) / (2.0 * h[:, None])
    return np.linalg.norm(grad, axis=1)


def gradient_scalings(idx, d: int, n_points: int, seed: int,
                      profile: CutoffProfile = DEFAULT_PROFILE) -> Dict[str, float]:
    """
    Largest rescaled cutoff gradients on the support of piece (i, j, k):
    |grad psi_j| * 2^(i-j) and |grad rho_k| * 2^(i-j-2k). Both stay bounded uniformly in the index.
    """
    idx = _index(idx)
    rng = make_rng((seed, idx.i, idx.j, idx.k))
    xi, eta = sample_piece_support(idx, d, n_points, rng, profile.epsilon)
    batch = FrequencyBatch.from_vectors(xi, eta)
    keep = np.asarray(piece_weight(idx, batch, profile)) > 0
    result = {"psi": 0.0, "rho": 0.0, "n_points": int(np.count_nonzero(keep))}
    if not np.any(keep):
        return result
    xi, eta = xi[keep], eta[keep]
    ratio_kind = "psi_upper" if idx.is_ratio_tail else "psi"
    result["psi"] = float(np.max(partition_gradient(ratio_kind, idx.j, xi, eta, profile=profile))
                          * 2.0 ** (idx.i - idx.j))
    if idx.j < idx.i:
        angle_kind = "rho_upper" if idx.is_angle_tail else "rho"
        result["rho"] = float(np.max(partition_gradient(angle_kind, idx.k, xi, eta, profile=profile))
                              * 2.0 ** (idx.i - idx.j - 2 * idx.k))
    return result


# ============================================================================
# SUPPORT VOLUMES
# ============================================================================

def ball_volume(d: int, radius: float) -> float:
    return math.exp(0.5 * d * math.log(math.pi) - gammaln(0.5 * d + 1.0)) * radius**d


def angular_fraction(d: int, lo: float, hi: float) -> float:
    """Probability that two independent uniform directions in R^d have lo <= |sin(theta)| <= hi"""
    if d < 2:
        raise DimensionError("angular_fraction", d, 2)
    lo = max(0.0, lo)
    hi = min(1.0, hi)
    if hi <= lo:
        return 0.0
    constant = angular_constant(d) if d >= 3 else 1.0 / math.pi
    value, _ = integrate(lambda a: math.sin(a) ** (d - 2), math.asin(lo), math.asin(hi),
                         epsabs=1e-14, epsrel=1e-12)
    return 2.0 * constant * value


def _support_radii(idx: DyadicIndex) -> Tuple[float, float, float, float]:
    """|xi| <= 2 * 2^i, |eta| <= 4 * 2^(i-j), 2^(-k-1) <= |sin| <= 2^(-k+1)"""
    return 2.0 ** (idx.i + 1), 2.0 ** (idx.i - idx.j + 2), 2.0 ** (-idx.k - 1), 2.0 ** (-idx.k + 1)


def support_volume(idx, d: int, n_mc: int, seed: int) -> Tuple[float, float]:
    """Monte Carlo Lebesgue measure of S_{i,j,k}; returns (estimate, standard error)"""
    idx = _index(idx)
    if d < 2:
        raise DimensionError("support_volume", d, 2)
    if n_mc < 2:
        raise DomainError("n_mc must be >= 2")
    r_xi, r_eta, lo, hi = _support_radii(idx)
    rng = make_rng((seed, idx.i, idx.j, idx.k))
    xi = uniform_sphere(rng, n_mc, d) * (r_xi * rng.random(n_mc) ** (1.0 / d))[:, None]
    eta = uniform_sphere(rng, n_mc, d) * (r_eta * rng.random(n_mc) ** (1.0 / d))[:, None]
    sin = FrequencyBatch.from_vectors(xi, eta).sin_theta
    hit = np.mean((sin >= lo) & (sin <= hi))
    boxes = ball_volume(d, r_xi) * ball_volume(d, r_eta)
    return boxes * hit, boxes * math.sqrt(hit * (1.0 - hit) / n_mc)


def support_volume_exact(idx, d: int) -> float:
    """Ball volumes times the angular fraction from a 1D integral"""
    idx = _index(idx)
    r_xi, r_eta, lo, hi = _support_radii(idx)
    return ball_volume(d, r_xi) * ball_volume(d, r_eta) * angular_fraction(d, lo, hi)


def volume_law(idx, d: int) -> float:
    """Dyadic law 2^(id) 2^((i-j)d) 2^(-k(d-1))"""
    idx = _index(idx)
    return 2.0 ** (idx.i * d + (idx.i - idx.j) * d - idx.k * (d - 1))


def volume_ratio_table(d: int, scales: Sequence[int], ratio_scales: Sequence[int],
                       angle_scales: Sequence[int], n_mc: int = 0, seed: int = 0) -> List[dict]:
    """Support volume over the dyadic law for every valid (i, j, k) in the given ranges"""
    rows = []
    for i in scales:
        for j in ratio_scales:
            for k in angle_scales:
                try:
                    idx = DyadicIndex(i, j, k)
                except InvalidIndexError:
                    continue
                exact = support_volume_exact(idx, d)
                row = {"i": i, "j": j, "k": k, "volume": exact, "law": volume_law(idx, d),
                       "ratio": exact / volume_law(idx, d)}
                if n_mc > 0:
                    estimate, se = support_volume(idx, d, n_mc, seed)
                    row.update({"mc_volume": estimate, "mc_se": se})
                rows.append(row)
    return rows


# ============================================================================
# NORM BOUNDS
# ============================================================================

def piece_norm_exponent(idx, d: int) -> Fraction:
    """
    Base-2 exponent of the L^2 x L^2 -> L^1 bound of piece (i, j, k):
    -i(d-2)/2 - (i-j-k)(d-2)/2 + (2i-j-k)d/4 + k/4
    """
    idx = _index(idx)
    if d < 3:
        raise DimensionError("piece_norm_bound", d, 3)
    i, j, k = idx.i, idx.j, idx.k
    return (Fraction(-i * (d - 2), 2) - Fraction((i - j - k) * (d - 2), 2)
            + Fraction((2 * i - j - k) * d, 4) + Fraction(k, 4))


def piece_norm_bound(idx, d: int) -> float:
    return 2.0 ** float(piece_norm_exponent(idx, d))


def norm_table(d: int, i_max: int) -> NormBoundTable:
    """Summed piece bounds C_i for i = 0..i_max and the asymptotic ratio 2^(1 - d/4)"""
    if d < 3:
        raise DimensionError("norm_table", d, 3)
    if i_max < 1:
        raise DomainError("norm_table needs i_max >= 1")
    rows = []
    for i in range(i_max + 1):
        pieces = [(idx.j, idx.k, piece_norm_bound(idx, d)) for idx in DyadicIndex.for_scale(i)]
        rows.append(NormBoundRow(i=i, pieces=pieces, summed=math.fsum(b for _, _, b in pieces),
                                 young_growth_log2=(d + 1) * i))
    table = NormBoundTable(
        d=d,
        rows=rows,
        total=math.fsum(row.summed for row in rows),
        geometric_ratio_log2=Fraction(4 - d, 4),
        observed_ratio=rows[-1].summed / rows[-2].summed,
        divergent=d <= 4,
    )
    marker = "⚠️" if table.divergent else "✓"
    logger.info("%s norm table d=%d: total=%.6g ratio=%.4f", marker, d, table.total, table.observed_ratio)
    return table


# ============================================================================
# EXPONENT REGIONS
# ============================================================================

def critical_exponent(d: int) -> Fraction:
    """p_d = 5d / (3d - 2)"""
    if int(d) != d or d < 5:
        raise DimensionError("critical_exponent", d, 5)
    return Fraction(5 * d, 3 * d - 2)


def summability_threshold(d: int) -> Fraction:
    """
    Diagonal exponent where the interpolated per-scale rate turns negative.

    The L^2 x L^2 -> L^1 rate is 1 - d/4 at (1/2, 1/2), the L^1 x L^1 growth is d + 1 at (1, 1);
    weight theta on the first endpoint makes the rate negative once theta exceeds
    (d + 1) / ((d + 1) + (d/4 - 1)), and the diagonal point is 1/p = 1 - theta/2.
    """
    if int(d) != d or d < 5:
        raise DimensionError("summability_threshold", d, 5)
    decay = Fraction(d, 4) - 1
    growth = Fraction(d + 1)
    theta = growth / (growth + decay)
    return 1 / (1 - theta / 2)


def theorem_vertices(d: int) -> List[Tuple[Fraction, Fraction, Fraction]]:
    p = critical_exponent(d)
    return [
        (Fraction(0), Fraction(0), Fraction(0)),
        (Fraction(1), Fraction(0), Fraction(1)),
        (Fraction(0), Fraction(1), Fraction(1)),
        (1 / p, 1 / p, 2 / p),
    ]


def banach_vertices(d: int) -> List[Tuple[Fraction, Fraction, Fraction]]:
    corner = Fraction(d, d + 1)
    return [
        (Fraction(0), Fraction(0), Fraction(0)),
        (Fraction(1), Fraction(0), Fraction(1)),
        (Fraction(0), Fraction(1), Fraction(1)),
        (corner, Fraction(0), 1 - corner),
        (Fraction(0), corner, 1 - corner),
    ]


def _reciprocals(*exponents: Exponent) -> Tuple[Fraction, ...]:
    return tuple(exponent_reciprocal(p) for p in exponents)


def region_contains(d: int, p: Exponent, q: Exponent, r: Exponent) -> bool:
    """Is (1/p, 1/q, 1/r) in the hull of (0,0,0), (1,0,1), (0,1,1), (1/p_d, 1/p_d, 2/p_d)?"""
    return ExactHull.of(theorem_vertices(d)).contains(_reciprocals(p, q, r))


def banach_region_contains(d: int, p: Exponent, q: Exponent, r: Exponent) -> bool:
    """Membership in the hull of the Hölder corners and the spherical L^p-improving corners"""
    if int(d) != d or d < 2:
        raise DimensionError("banach_region_contains", d, 2)
    return ExactHull.of(banach_vertices(d)).contains(_reciprocals(p, q, r))


def spherical_improving_contains(d: int, p: Exponent, s: Exponent) -> bool:
    """(1/p, 1/s) in the closed triangle (0,0), (1,1), (d/(d+1), 1/(d+1))"""
    if int(d) != d or d < 2:
        raise DimensionError("spherical_improving_contains", d, 2)
    triangle = [(0, 0), (1, 1), (Fraction(d, d + 1), Fraction(1, d + 1))]
    return ExactHull.of(triangle).contains(_reciprocals(p, s))
