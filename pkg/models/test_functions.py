# ============================================================================
# TEST FUNCTIONS
# ============================================================================

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.exceptions import DomainError, TestFunctionSyntaxError, UnboundedFunctionError


# ============================================================================
# TEST FUNCTIONS
# ============================================================================

class FunctionKind(str, Enum):
    GAUSSIAN = "gaussian"
    RADIAL_POWER_LOG = "radial_power_log"
    BALL_INDICATOR = "ball_indicator"
    CONSTANT = "constant"


class PowerLogRegion(str, Enum):
    INNER = "inner"
    OUTER = "outer"


@dataclass(frozen=True)
class TestFunction:
    """
    Radial function on R^d: f(y) = profile(|y - center| / scale).

    gaussian            exp(-pi rho^2 / width^2)
    radial_power_log    rho^-a (-log rho)^-b on rho <= radius < 1 (inner, 0 at rho = 0),
                        rho^-a (log rho)^-b on rho >= radius > 1 (outer)
    ball_indicator      1 on the closed ball rho <= radius
    constant            value everywhere

    An empty center means the origin.
    """
    __test__ = False

    kind: FunctionKind
    center: Tuple[float, ...] = ()
    width: float = 1.0
    radius: float = 1.0
    exponent: float = 0.0
    log_exponent: float = 0.0
    region: PowerLogRegion = PowerLogRegion.INNER
    value: float = 1.0
    scale: float = 1.0
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", FunctionKind(self.kind))
        object.__setattr__(self, "region", PowerLogRegion(self.region))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not all(math.isfinite(c) for c in self.center):
            raise DomainError("test function center must be finite")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"scale must be a positive real, got {self.scale}")
        if self.kind == FunctionKind.GAUSSIAN and not self.width > 0:
            raise DomainError(f"gaussian width must be positive, got {self.width}")
        if self.kind == FunctionKind.BALL_INDICATOR and not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")
        if self.kind == FunctionKind.RADIAL_POWER_LOG:
            if self.region == PowerLogRegion.INNER and not 0 < self.radius < 1:
                raise DomainError("inner power-log pieces need a radius in (0, 1)")
            if self.region == PowerLogRegion.OUTER and not self.radius > 1:
                raise DomainError("outer power-log pieces need a radius > 1")
        if self.kind == FunctionKind.CONSTANT and not math.isfinite(self.value):
            raise DomainError("constant value must be finite")

    # ------------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------------

    @classmethod
    def gaussian(cls, center: Sequence[float] = (), width: float = 1.0) -> 'TestFunction':
        return cls(FunctionKind.GAUSSIAN, center=tuple(center), width=width)

    @classmethod
    def ball(cls, center: Sequence[float] = (), radius: float = 1.0) -> 'TestFunction':
        return cls(FunctionKind.BALL_INDICATOR, center=tuple(center), radius=radius)

    @classmethod
    def constant(cls, value: float = 1.0) -> 'TestFunction':
        return cls(FunctionKind.CONSTANT, value=value)

    @classmethod
    def power_log(cls, a: float, b: float, region: str, radius: float,
                  label: Optional[str] = None) -> 'TestFunction':
        return cls(FunctionKind.RADIAL_POWER_LOG, exponent=a, log_exponent=b, region=PowerLogRegion(region),
                   radius=radius, label=label)

    @classmethod
    def counterexample_f(cls, d: int, p: float) -> 'TestFunction':
        """|x|^(-d/p) (-log|x|)^(-2/p) on |x| <= 1/8"""
        if not p > 0:
            raise DomainError(f"p must be positive, got {p}")
        return cls.power_log(d / p, 2.0 / p, "inner", 0.125, label=f"cex-f(p={p:g})")

    @classmethod
    def counterexample_g(cls, d: int, q: float) -> 'TestFunction':
        """|x|^(-d/q) (log|x|)^(-2/q) on |x| >= 8"""
        if not q > 0:
            raise DomainError(f"q must be positive, got {q}")
        return cls.power_log(d / q, 2.0 / q, "outer", 8.0, label=f"cex-g(q={q:g})")

    def dilated(self, s: float) -> 'TestFunction':
        """y -> f(y / s)"""
        if not s > 0:
            raise DomainError(f"dilation factor must be positive, got {s}")
        return replace(self, center=tuple(s * c for c in self.center), scale=self.scale * s, label=None)

    # ------------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------------

    def center_array(self, d: int) -> np.ndarray:
        if not self.center:
            return np.zeros(d)
        if len(self.center) != d:
            raise DomainError(f"center has dimension {len(self.center)}, expected {d}")
        return np.asarray(self.center, dtype=float)

    def profile(self, rho) -> np.ndarray:
        """Value as a function of the distance |y - center|"""
        rho = np.asarray(rho, dtype=float) / self.scale
        if self.kind == FunctionKind.GAUSSIAN:
            return np.exp(-math.pi * (rho / self.width) ** 2)
        if self.kind == FunctionKind.BALL_INDICATOR:
            return np.where(rho <= self.radius, 1.0, 0.0)
        if self.kind == FunctionKind.CONSTANT:
            return np.full(rho.shape, float(self.value))
        a, b = self.exponent, self.log_exponent
        if self.region == PowerLogRegion.INNER:
            inside = (rho > 0) & (rho <= self.radius)
            safe = np.where(inside, rho, 0.5 * self.radius)
            with np.errstate(over="ignore"):
                values = np.exp(-a * np.log(safe) - b * np.log(-np.log(safe)))
        else:
            inside = rho >= self.radius
            safe = np.where(inside, rho, self.radius)
            values = np.exp(-a * np.log(safe) - b * np.log(np.log(safe)))
        return np.where(inside, values, 0.0)

    def __call__(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        d = points.shape[-1]
        return self.profile(np.linalg.norm(points - self.center_array(d), axis=-1))

    def fourier_transform(self, xi: np.ndarray) -> np.ndarray:
        """Exact transform of a gaussian: (w s)^d exp(-pi (w s)^2 |xi|^2) exp(-2 pi i c.xi)"""
        if self.kind != FunctionKind.GAUSSIAN:
            raise DomainError(f"closed-form Fourier transform only for gaussians, not {self.kind.value}")
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        d = xi.shape[1]
        w = self.width * self.scale
        phase = np.exp(-2j * math.pi * (xi @ self.center_array(d)))
        return w**d * np.exp(-math.pi * w * w * np.sum(xi * xi, axis=1)) * phase

    # ------------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------------

    @property
    def is_constant(self) -> bool:
        return self.kind == FunctionKind.CONSTANT

    @property
    def is_singular(self) -> bool:
        return self.kind == FunctionKind.RADIAL_POWER_LOG and self.region == PowerLogRegion.INNER

    @property
    def is_bounded(self) -> bool:
        return not self.is_singular

    @property
    def is_nonnegative(self) -> bool:
        return self.kind != FunctionKind.CONSTANT or self.value >= 0

    def sup_norm(self) -> float:
        if self.is_singular:
            raise UnboundedFunctionError(f"{self.to_spec()} is unbounded near its center")
        if self.kind == FunctionKind.CONSTANT:
            return abs(self.value)
        if self.kind == FunctionKind.RADIAL_POWER_LOG:
            # The outer piece peaks on its inner sphere for a, b >= 0.
            return float(self.profile(self.radius * self.scale))
        return 1.0

    def characteristic_radii(self) -> List[float]:
        """Distances from the center where the profile breaks or changes scale"""
        if self.kind == FunctionKind.GAUSSIAN:
            return [self.width * self.scale * f for f in (0.5, 1.0, 2.0, 3.0)]
        if self.kind in (FunctionKind.BALL_INDICATOR, FunctionKind.RADIAL_POWER_LOG):
            return [self.radius * self.scale]
        return []

    # ------------------------------------------------------------------------
    # Text form
    # ------------------------------------------------------------------------

    def _center_text(self) -> str:
        return ",".join(f"{c:g}" for c in self.center) if any(self.center) else "0"

    def to_spec(self) -> str:
        """Grammar string for this function (dilations are recorded in to_dict only)"""
        if self.label:
            return self.label
        if self.kind == FunctionKind.GAUSSIAN:
            return f"gaussian({self._center_text()};{self.width:g})"
        if self.kind == FunctionKind.BALL_INDICATOR:
            return f"ball({self._center_text()};{self.radius:g})"
        if self.kind == FunctionKind.CONSTANT:
            return f"const({self.value:g})"
        return f"powerlog({self.exponent:g};{self.log_exponent:g};{self.region.value};{self.radius:g})"

    def to_dict(self) -> dict:
        """Convert TestFunction to dictionary for saving"""
        return {
            "kind": self.kind.value,
            "center": list(self.center),
            "width": self.width,
            "radius": self.radius,
            "exponent": self.exponent,
            "log_exponent": self.log_exponent,
            "region": self.region.value,
            "value": self.value,
            "scale": self.scale,
            "spec": self.to_spec(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'TestFunction':
        """Create TestFunction from dictionary"""
        return cls(
            kind=FunctionKind(data["kind"]),
            center=tuple(data.get("center", ())),
            width=data.get("width", 1.0),
            radius=data.get("radius", 1.0),
            exponent=data.get("exponent", 0.0),
            log_exponent=data.get("log_exponent", 0.0),
            region=PowerLogRegion(data.get("region", "inner")),
            value=data.get("value", 1.0),
            scale=data.get("scale", 1.0),
        )


# ============================================================================
# GRAMMAR
# ============================================================================
#
#   gaussian(CENTER;WIDTH)   ball(CENTER;RADIUS)   const(VALUE)
#   cex-f(p=P)   cex-g(q=Q)   powerlog(A;B;inner|outer;RADIUS)
#
# CENTER is 0 or d comma-separated reals.

_CALL = re.compile(r"^\s*([a-z][a-z\-]*)\s*\((.*)\)\s*$")


def _number(text: str, source: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise TestFunctionSyntaxError(f"expected a number, got {text!r} in {source!r}") from None
    if not math.isfinite(value):
        raise TestFunctionSyntaxError(f"non-finite number in {source!r}")
    return value


def _center(text: str, d: int, source: str) -> Tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if parts == ["0"]:
        return ()
    if len(parts) != d:
        raise TestFunctionSyntaxError(f"center in {source!r} has {len(parts)} entries, expected {d}")
    return tuple(_number(p, source) for p in parts)


def _keyword(text: str, key: str, source: str) -> float:
    name, sep, raw = text.partition("=")
    if not sep or name.strip() != key:
        raise TestFunctionSyntaxError(f"expected {key}=VALUE in {source!r}")
    return _number(raw.strip(), source)


def _arguments(body: str, count: int, source: str) -> List[str]:
    args = [a.strip() for a in body.split(";")]
    if len(args) != count:
        raise TestFunctionSyntaxError(f"{source!r} takes {count} ';'-separated arguments, got {len(args)}")
    return args


def parse_test_function(text: str, d: int) -> TestFunction:
    """Parse one test function from its textual form, e.g. gaussian(0;1) or cex-f(p=4)"""
    match = _CALL.match(text or "")
    if match is None:
        raise TestFunctionSyntaxError(f"cannot parse test function {text!r}")
    name, body = match.group(1), match.group(2)
    try:
        if name == "gaussian":
            center, width = _arguments(body, 2, text)
            return TestFunction.gaussian(_center(center, d, text), _number(width, text))
        if name == "ball":
            center, radius = _arguments(body, 2, text)
            return TestFunction.ball(_center(center, d, text), _number(radius, text))
        if name in ("const", "constant"):
            (value,) = _arguments(body, 1, text)
            return TestFunction.constant(_number(value, text))
        if name == "cex-f":
            return TestFunction.counterexample_f(d, _keyword(body, "p", text))
        if name == "cex-g":
            return TestFunction.counterexample_g(d, _keyword(body, "q", text))
        if name == "powerlog":
            a, b, region, radius = _arguments(body, 4, text)
            if region not in ("inner", "outer"):
                raise TestFunctionSyntaxError(f"region must be inner or outer in {text!r}")
            return TestFunction.power_log(_number(a, text), _number(b, text), region, _number(radius, text))
    except TestFunctionSyntaxError:
        raise
    except DomainError as e:
        raise TestFunctionSyntaxError(f"{text!r}: {e}") from e
    raise TestFunctionSyntaxError(f"unknown test function {name!r}")
