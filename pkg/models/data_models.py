# ============================================================================
# DATA MODELS
# ============================================================================

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from models.exceptions import DomainError, InvalidIndexError

ARTIFACT_VERSION = "1.0.0"

MAX_SEED = 2**64 - 1


# ============================================================================
# SPECIAL FUNCTIONS
# ============================================================================

@dataclass(frozen=True)
class BesselOrder:
    """Real order nu >= 0 of a Bessel function of the first kind"""
    nu: float

    def __post_init__(self):
        if not math.isfinite(self.nu) or self.nu < 0:
            raise DomainError(f"Bessel order must be finite and >= 0, got {self.nu}")

    @property
    def is_half_integer(self) -> bool:
        twice = 2.0 * self.nu
        return twice == round(twice) and int(round(twice)) % 2 == 1

    @classmethod
    def coerce(cls, order) -> 'BesselOrder':
        """Accept either a BesselOrder or a plain number"""
        if isinstance(order, cls):
            return order
        return cls(float(order))


# ============================================================================
# GEOMETRY
# ============================================================================

class Rotation:
    """Element of SO(d) stored as an orthogonal matrix"""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DomainError(f"rotation matrix must be square, got shape {matrix.shape}")
        gram = matrix.T @ matrix
        if np.max(np.abs(gram - np.eye(matrix.shape[0]))) > 1e-12:
            raise DomainError("rotation matrix is not orthogonal")
        if abs(np.linalg.det(matrix) - 1.0) > 1e-10:
            raise DomainError("rotation matrix must have determinant +1")
        self.matrix = matrix

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        return np.asarray(vectors) @ self.matrix.T

    def to_dict(self) -> dict:
        """Convert Rotation to dictionary for saving"""
        return {"matrix": self.matrix.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> 'Rotation':
        """Create Rotation from dictionary"""
        return cls(np.array(data["matrix"], dtype=float))


class ManifoldSample:
    """A pair (u, v) of unit vectors with |u - v| = 1, i.e. a unit equilateral triangle {0, u, v}"""

    def __init__(self, u: np.ndarray, v: np.ndarray):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if u.shape != v.shape or u.ndim != 1:
            raise DomainError("manifold sample needs two vectors of equal dimension")
        for name, value in (("|u|", np.linalg.norm(u)), ("|v|", np.linalg.norm(v)),
                            ("|u-v|", np.linalg.norm(u - v))):
            if abs(value - 1.0) > 1e-12:
                raise DomainError(f"{name} = {value!r} is not 1")
        self.u = u
        self.v = v

    def to_dict(self) -> dict:
        """Convert ManifoldSample to dictionary for saving"""
        return {"u": self.u.tolist(), "v": self.v.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> 'ManifoldSample':
        """Create ManifoldSample from dictionary"""
        return cls(np.array(data["u"]), np.array(data["v"]))


# ============================================================================
# QUADRATURE
# ============================================================================

class QuadratureMethod(str, Enum):
    MONTE_CARLO = "monte_carlo"
    PRODUCT_SLICING = "product_slicing"


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Governs every integral in the lab.

    n_outer: azimuthal nodes (or Monte Carlo points) for the S^{d-2} factor of a slice
    n_inner: Gauss-Legendre nodes per panel on the fiber N_u
    n_radial: Gauss-Legendre nodes per panel in the polar angle
    n_samples: manifold samples for the Monte Carlo method
    grading_depth: decades of geometric grading toward a singular configuration
    """
    method: QuadratureMethod = QuadratureMethod.PRODUCT_SLICING
    n_outer: int = 24
    n_inner: int = 16
    n_radial: int = 16
    seed: int = 0
    n_samples: int = 100_000
    grading_depth: int = 16
    tolerance: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "method", QuadratureMethod(self.method))
        for name in ("n_outer", "n_inner", "n_radial", "n_samples", "grading_depth"):
            if int(getattr(self, name)) < 1:
                raise DomainError(f"{name} must be >= 1")
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise DomainError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def halved(self) -> 'QuadratureSpec':
        """Same rule at half resolution, used for error estimates"""
        return replace(
            self,
            n_outer=max(1, self.n_outer // 2),
            n_inner=max(1, self.n_inner // 2),
            n_radial=max(1, self.n_radial // 2),
            n_samples=max(1, self.n_samples // 2),
        )

    def with_depth(self, grading_depth: int) -> 'QuadratureSpec':
        return replace(self, grading_depth=grading_depth)

    def to_dict(self) -> dict:
        """Convert QuadratureSpec to dictionary for saving"""
        return {
            "method": self.method.value,
            "n_outer": self.n_outer,
            "n_inner": self.n_inner,
            "n_radial": self.n_radial,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "grading_depth": self.grading_depth,
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'QuadratureSpec':
        """Create QuadratureSpec from dictionary"""
        return cls(**data)


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a deterministic or Monte Carlo integral and its error estimate"""
    value: float
    error: float
    n_nodes: int
    method: str = QuadratureMethod.PRODUCT_SLICING.value

    def to_dict(self) -> dict:
        return {"value": self.value, "error": self.error, "n_nodes": self.n_nodes, "method": self.method}


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Complex sample mean with componentwise standard errors"""
    value: complex
    se_real: float
    se_imag: float
    n_samples: int

    @property
    def se(self) -> float:
        return math.hypot(self.se_real, self.se_imag)

    def to_dict(self) -> dict:
        return {
            "real": self.value.real,
            "imag": self.value.imag,
            "se_real": self.se_real,
            "se_imag": self.se_imag,
            "n_samples": self.n_samples,
        }


# ============================================================================
# FREQUENCIES
# ============================================================================

def _angle_between(xi: np.ndarray, eta: np.ndarray, norm_xi, norm_eta):
    """(cos, |sin|) of the angle between rows of xi and eta; (1, 0) when either vanishes"""
    degenerate = (norm_xi == 0) | (norm_eta == 0)
    safe_eta = np.where(degenerate, 1.0, norm_eta)
    safe_xi = np.where(degenerate, 1.0, norm_xi)
    eta_hat = eta / safe_eta[..., None]
    along = np.sum(xi * eta_hat, axis=-1)
    perp = xi - along[..., None] * eta_hat
    cos_theta = along / safe_xi
    sin_theta = np.linalg.norm(perp, axis=-1) / safe_xi
    scale = np.hypot(cos_theta, sin_theta)
    scale = np.where(scale == 0, 1.0, scale)
    cos_theta = np.clip(cos_theta / scale, -1.0, 1.0)
    sin_theta = np.clip(sin_theta / scale, 0.0, 1.0)
    cos_theta = np.where(degenerate, 1.0, cos_theta)
    sin_theta = np.where(degenerate, 0.0, sin_theta)
    return cos_theta, sin_theta


class FrequencyPair:
    """A point (xi, eta) of R^d x R^d with cached norms and angle data"""

    def __init__(self, xi, eta):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        if xi.shape != eta.shape or xi.ndim != 1:
            raise DomainError("xi and eta must be vectors of the same dimension")
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(eta))):
            raise DomainError("frequencies must be finite")
        self.xi = xi
        self.eta = eta
        self.norm_xi = float(np.linalg.norm(xi))
        self.norm_eta = float(np.linalg.norm(eta))
        cos_theta, sin_theta = _angle_between(xi, eta, np.float64(self.norm_xi), np.float64(self.norm_eta))
        self.cos_theta = float(cos_theta)
        self.sin_theta = float(sin_theta)
        self.joint_norm = math.hypot(self.norm_xi, self.norm_eta)

    @property
    def dimension(self) -> int:
        return self.xi.shape[0]

    def swapped(self) -> 'FrequencyPair':
        return FrequencyPair(self.eta, self.xi)

    def rotated(self, rotation: Rotation) -> 'FrequencyPair':
        return FrequencyPair(rotation.apply(self.xi), rotation.apply(self.eta))

    @classmethod
    def from_angle(cls, norm_xi: float, norm_eta: float, theta: float, d: int) -> 'FrequencyPair':
        """Canonical pair: eta along e1, xi in the (e1, e2) plane at angle theta"""
        if d < 2:
            raise DomainError("from_angle needs d >= 2")
        eta = np.zeros(d)
        eta[0] = norm_eta
        xi = np.zeros(d)
        xi[0] = norm_xi * math.cos(theta)
        xi[1] = norm_xi * math.sin(theta)
        return cls(xi, eta)

    def to_dict(self) -> dict:
        """Convert FrequencyPair to dictionary for saving"""
        return {
            "xi": self.xi.tolist(),
            "eta": self.eta.tolist(),
            "norm_xi": self.norm_xi,
            "norm_eta": self.norm_eta,
            "cos_theta": self.cos_theta,
            "sin_theta": self.sin_theta,
            "joint_norm": self.joint_norm,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'FrequencyPair':
        """Create FrequencyPair from dictionary"""
        return cls(np.array(data["xi"]), np.array(data["eta"]))

    def __repr__(self):
        return (f"FrequencyPair(|xi|={self.norm_xi:.6g}, |eta|={self.norm_eta:.6g}, "
                f"cos={self.cos_theta:.6g})")


class FrequencyBatch:
    """Invariants (|xi|, |eta|, cos, |sin|) of many frequency pairs, for vectorized evaluation"""

    def __init__(self, norm_xi, norm_eta, cos_theta, sin_theta, d: int):
        self.norm_xi = np.asarray(norm_xi, dtype=float)
        self.norm_eta = np.asarray(norm_eta, dtype=float)
        self.cos_theta = np.asarray(cos_theta, dtype=float)
        self.sin_theta = np.asarray(sin_theta, dtype=float)
        self.d = int(d)
        self.joint_norm = np.hypot(self.norm_xi, self.norm_eta)

    def __len__(self):
        return int(self.norm_xi.size)

    @property
    def dimension(self) -> int:
        return self.d

    @classmethod
    def from_vectors(cls, xi: np.ndarray, eta: np.ndarray) -> 'FrequencyBatch':
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        eta = np.atleast_2d(np.asarray(eta, dtype=float))
        if xi.shape != eta.shape:
            raise DomainError("xi and eta batches must have the same shape")
        norm_xi = np.linalg.norm(xi, axis=1)
        norm_eta = np.linalg.norm(eta, axis=1)
        cos_theta, sin_theta = _angle_between(xi, eta, norm_xi, norm_eta)
        return cls(norm_xi, norm_eta, cos_theta, sin_theta, xi.shape[1])

    @classmethod
    def from_pairs(cls, pairs: List[FrequencyPair]) -> 'FrequencyBatch':
        if not pairs:
            raise DomainError("empty frequency grid")
        return cls(
            [fp.norm_xi for fp in pairs],
            [fp.norm_eta for fp in pairs],
            [fp.cos_theta for fp in pairs],
            [fp.sin_theta for fp in pairs],
            pairs[0].dimension,
        )

    @classmethod
    def from_angles(cls, norm_xi, norm_eta, theta, d: int) -> 'FrequencyBatch':
        theta = np.asarray(theta, dtype=float)
        norm_xi, norm_eta, theta = np.broadcast_arrays(np.asarray(norm_xi, dtype=float),
                                                       np.asarray(norm_eta, dtype=float), theta)
        cos_theta = np.cos(theta)
        sin_theta = np.abs(np.sin(theta))
        degenerate = (norm_xi == 0) | (norm_eta == 0)
        return cls(norm_xi, norm_eta, np.where(degenerate, 1.0, cos_theta),
                   np.where(degenerate, 0.0, sin_theta), d)


@dataclass(frozen=True)
class DecayDirection:
    """Ray R -> (R * xi_dir, R * ratio * eta_dir) through frequency space"""
    xi_dir: Tuple[float, ...]
    eta_dir: Tuple[float, ...]
    ratio: float
    name: str = "ray"

    def __post_init__(self):
        for label, vector in (("xi_dir", self.xi_dir), ("eta_dir", self.eta_dir)):
            if abs(float(np.linalg.norm(vector)) - 1.0) > 1e-10:
                raise DomainError(f"{label} must be a unit vector")
        if len(self.xi_dir) != len(self.eta_dir):
            raise DomainError("direction vectors must have the same dimension")
        if not math.isfinite(self.ratio) or self.ratio < 0:
            raise DomainError("ratio |eta|/|xi| must be finite and >= 0")

    @property
    def dimension(self) -> int:
        return len(self.xi_dir)

    def batch(self, radii: np.ndarray) -> FrequencyBatch:
        radii = np.asarray(radii, dtype=float)
        xi = np.asarray(self.xi_dir, dtype=float)
        eta = np.asarray(self.eta_dir, dtype=float)
        cos_theta = float(np.clip(np.dot(xi, eta), -1.0, 1.0))
        sin_theta = float(np.linalg.norm(xi - np.dot(xi, eta) * eta))
        if self.ratio == 0:
            cos_theta, sin_theta = 1.0, 0.0
        ones = np.ones_like(radii)
        return FrequencyBatch(radii, self.ratio * radii, cos_theta * ones, sin_theta * ones,
                              self.dimension)

    def to_dict(self) -> dict:
        return {"xi_dir": list(self.xi_dir), "eta_dir": list(self.eta_dir),
                "ratio": self.ratio, "name": self.name}

    @classmethod
    def from_dict(cls, data: dict) -> 'DecayDirection':
        return cls(tuple(data["xi_dir"]), tuple(data["eta_dir"]), data["ratio"], data.get("name", "ray"))


@dataclass
class DecayFit:
    """Log-log fit of the upper envelope of |mu_hat| along a ray"""
    direction: DecayDirection
    radii: np.ndarray
    envelope: np.ndarray
    bound: np.ndarray
    slope: float
    intercept: float
    residual: float
    bound_slope: float

    def __post_init__(self):
        if np.any(np.diff(self.radii) <= 0) or np.any(self.radii < 1):
            raise DomainError("fit radii must be strictly increasing and >= 1")
        if not math.isfinite(self.slope):
            raise DomainError("fitted slope is not finite")

    def rows(self) -> List[dict]:
        """CSV rows: R, |mu_hat|, bound, ratio"""
        return [
            {"R": float(r), "abs_mu_hat": float(m), "bound": float(b), "ratio": float(m / b)}
            for r, m, b in zip(self.radii, self.envelope, self.bound)
        ]

    def to_dict(self) -> dict:
        """Convert DecayFit to dictionary for saving"""
        return {
            "direction": self.direction.to_dict(),
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "bound_slope": self.bound_slope,
            "n_points": int(len(self.radii)),
        }


# ============================================================================
# DECOMPOSITION
# ============================================================================

@dataclass(frozen=True, order=True)
class DyadicIndex:
    """Address (i, j, k) of one piece m_{i,j,k}: joint-norm scale, ratio scale, angle scale"""
    i: int
    j: int
    k: int

    def __post_init__(self):
        i, j, k = self.i, self.j, self.k
        if min(i, j, k) < 0:
            raise InvalidIndexError(f"negative entry in {(i, j, k)}")
        if j <= i - 1:
            ok = k <= (i - j) // 2
        elif j == i:
            ok = k == 0
        elif j == i + 1:
            ok = k == 0 and i >= 1
        else:
            ok = False
        if not ok:
            raise InvalidIndexError(f"{(i, j, k)} is not a valid decomposition index")

    @staticmethod
    def last_ratio_scale(i: int) -> int:
        """The j that carries the tail psi^j at joint scale i"""
        return i + 1 if i >= 1 else 0

    @property
    def angle_cap(self) -> int:
        """floor((i - j) / 2) for split pieces, 0 otherwise"""
        return (self.i - self.j) // 2 if self.j < self.i else 0

    @property
    def is_ratio_tail(self) -> bool:
        return self.j == self.last_ratio_scale(self.i)

    @property
    def is_angle_tail(self) -> bool:
        return self.j < self.i and self.k == self.angle_cap

    @classmethod
    def for_scale(cls, i: int) -> List['DyadicIndex']:
        """Every valid index with first entry i, ordered by (j, k)"""
        if i < 0:
            raise InvalidIndexError(f"scale index must be >= 0, got {i}")
        indices = [cls(i, j, k) for j in range(i) for k in range((i - j) // 2 + 1)]
        indices.append(cls(i, i, 0))
        if i >= 1:
            indices.append(cls(i, i + 1, 0))
        return indices

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.i, self.j, self.k)

    def to_dict(self) -> dict:
        return {"i": self.i, "j": self.j, "k": self.k}

    @classmethod
    def from_dict(cls, data: dict) -> 'DyadicIndex':
        return cls(int(data["i"]), int(data["j"]), int(data["k"]))


@dataclass
class NormBoundRow:
    """Per-scale entry of the norm-bound table"""
    i: int
    pieces: List[Tuple[int, int, float]]
    summed: float
    young_growth_log2: int

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "pieces": [{"j": j, "k": k, "bound": b} for j, k, b in self.pieces],
            "summed": self.summed,
            "young_growth_log2": self.young_growth_log2,
        }


@dataclass
class NormBoundTable:
    """Summed piece bounds C_i and their asymptotic geometric ratio"""
    d: int
    rows: List[NormBoundRow]
    total: float
    geometric_ratio_log2: Fraction
    observed_ratio: float
    divergent: bool

    @property
    def geometric_ratio(self) -> float:
        return 2.0 ** float(self.geometric_ratio_log2)

    def to_dict(self) -> dict:
        """Convert NormBoundTable to dictionary for saving"""
        return {
            "d": self.d,
            "rows": [row.to_dict() for row in self.rows],
            "total": self.total,
            "geometric_ratio_log2": str(self.geometric_ratio_log2),
            "geometric_ratio": self.geometric_ratio,
            "observed_ratio": self.observed_ratio,
            "divergent": self.divergent,
        }


# ============================================================================
# MAXIMAL OPERATOR
# ============================================================================

@dataclass(frozen=True)
class MaximalGrid:
    """
    Geometric grid of dilation radii t.

    With an anchor the grid is symmetric in log-scale about the anchor, which is always a node.
    """
    t_min: float
    t_max: float
    n_t: int
    anchor: Optional[float] = None

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max) or not math.isfinite(self.t_max):
            raise DomainError(f"need 0 < t_min < t_max, got {self.t_min}, {self.t_max}")
        if self.n_t < 2:
            raise DomainError("a maximal grid needs at least two radii")
        if self.anchor is not None:
            if self.n_t % 2 == 0:
                raise DomainError("an anchored grid needs an odd number of radii")
            if not math.isclose(self.t_min * self.t_max, self.anchor**2, rel_tol=1e-12):
                raise DomainError("anchor must be the geometric midpoint of the grid")

    @classmethod
    def anchored(cls, anchor: float, decades: float = 0.5, per_decade: int = 64) -> 'MaximalGrid':
        half = max(1, int(round(decades * per_decade)))
        factor = 10.0**decades
        return cls(anchor / factor, anchor * factor, 2 * half + 1, anchor)

    def values(self) -> np.ndarray:
        if self.anchor is None:
            steps = np.arange(self.n_t) / (self.n_t - 1)
            return self.t_min * (self.t_max / self.t_min) ** steps
        half = (self.n_t - 1) // 2
        steps = np.arange(-half, half + 1) / half
        upper = self.anchor * (self.t_max / self.anchor) ** steps[steps >= 0]
        lower = self.anchor * (self.anchor / self.t_min) ** steps[steps < 0]
        return np.concatenate([lower, upper])

    def refined(self) -> 'MaximalGrid':
        """Grid with 2n - 1 radii containing every current radius"""
        return replace(self, n_t=2 * self.n_t - 1)

    def to_dict(self) -> dict:
        return {"t_min": self.t_min, "t_max": self.t_max, "n_t": self.n_t, "anchor": self.anchor}

    @classmethod
    def from_dict(cls, data: dict) -> 'MaximalGrid':
        return cls(data["t_min"], data["t_max"], int(data["n_t"]), data.get("anchor"))


@dataclass
class MaximalEvaluation:
    """|T_t(f, g)(x)| over a grid of radii; the maximum is a lower bound for the supremum"""
    x: Tuple[float, ...]
    radii: np.ndarray
    values: np.ndarray
    errors: np.ndarray

    @property
    def value(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def t_star(self) -> float:
        return float(self.radii[int(np.argmax(np.abs(self.values)))])

    def rows(self) -> List[dict]:
        """CSV rows: x, t, value, error"""
        x_text = ",".join(f"{c:.17g}" for c in self.x)
        return [{"x": x_text, "t": float(t), "value": float(v), "error": float(e)}
                for t, v, e in zip(self.radii, self.values, self.errors)]

    def to_dict(self) -> dict:
        """Convert MaximalEvaluation to dictionary for saving"""
        return {
            "x": list(self.x),
            "value": self.value,
            "t_star": self.t_star,
            "n_t": int(len(self.radii)),
        }


@dataclass
class DivergenceLevel:
    level: int
    n_t: int
    grading_depth: int
    value: float
    t_star: float

    def to_dict(self) -> dict:
        return {"level": self.level, "n_t": self.n_t, "grading_depth": self.grading_depth,
                "value": self.value, "t_star": self.t_star}


@dataclass
class DivergenceReport:
    """Maximal values at a singular configuration over successive refinements"""
    levels: List[DivergenceLevel]
    threshold: float

    @property
    def monotone(self) -> bool:
        values = [level.value for level in self.levels]
        return all(b >= a for a, b in zip(values, values[1:]))

    @property
    def exceeds(self) -> bool:
        return bool(self.levels) and self.levels[-1].value > self.threshold

    @property
    def diverges(self) -> bool:
        return self.monotone and self.exceeds

    def to_dict(self) -> dict:
        return {
            "levels": [level.to_dict() for level in self.levels],
            "threshold": self.threshold,
            "monotone": self.monotone,
            "diverges": self.diverges,
        }


@dataclass
class MaximalDecayFit:
    """Log-log slope of the maximal operator along a ray, against the counterexample exponent"""
    radii: np.ndarray
    values: np.ndarray
    t_stars: np.ndarray
    slope: float
    intercept: float
    expected: float

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.expected) / abs(self.expected)

    def rows(self) -> List[dict]:
        return [{"R": float(r), "value": float(v), "t_star": float(t)}
                for r, v, t in zip(self.radii, self.values, self.t_stars)]

    def to_dict(self) -> dict:
        """Convert MaximalDecayFit to dictionary for saving"""
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "expected": self.expected,
            "relative_error": self.relative_error,
            "n_points": int(len(self.radii)),
        }


@dataclass
class MajorizationReport:
    """|T_t(f, g)(x)| against ||g||_inf S_t|f|(x), and against ||f||_inf S_t|g|(x) when f is bounded"""
    lhs: float
    lhs_error: float
    rhs: float
    rhs_error: float
    symmetric_rhs: Optional[float] = None
    symmetric_error: Optional[float] = None

    @property
    def slack(self) -> float:
        return 3.0 * (self.lhs_error + self.rhs_error) + 1e-12

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.slack

    @property
    def symmetric_holds(self) -> Optional[bool]:
        if self.symmetric_rhs is None:
            return None
        return self.lhs <= self.symmetric_rhs + 3.0 * (self.lhs_error + (self.symmetric_error or 0.0)) + 1e-12

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "lhs_error": self.lhs_error,
            "rhs": self.rhs,
            "rhs_error": self.rhs_error,
            "holds": self.holds,
            "symmetric_rhs": self.symmetric_rhs,
            "symmetric_holds": self.symmetric_holds,
        }


# ============================================================================
# RUN CONFIGURATION
# ============================================================================

@dataclass
class RunConfig:
    """Everything a CLI command needs besides its own arguments"""
    dimension: int = 5
    seed: int = 42
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    output_path: Optional[Path] = None
    output_format: str = "json"
    tier: str = "fast"

    def __post_init__(self):
        if self.output_format not in ("csv", "json"):
            raise DomainError(f"unknown output format {self.output_format!r}")
        if self.tier not in ("fast", "full"):
            raise DomainError(f"unknown verification tier {self.tier!r}")
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise DomainError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def to_dict(self) -> dict:
        """Convert RunConfig to dictionary for saving"""
        return {
            "dimension": self.dimension,
            "seed": self.seed,
            "quadrature": self.quadrature.to_dict(),
            "output_path": str(self.output_path) if self.output_path else None,
            "output_format": self.output_format,
            "tier": self.tier,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'RunConfig':
        """Create RunConfig from dictionary"""
        return cls(
            dimension=int(data["dimension"]),
            seed=int(data["seed"]),
            quadrature=QuadratureSpec.from_dict(data.get("quadrature", {})),
            output_path=Path(data["output_path"]) if data.get("output_path") else None,
            output_format=data.get("output_format", "json"),
            tier=data.get("tier", "fast"),
        )
