# ============================================================================
# EXACT CONVEX HULLS
# ============================================================================
#
# Membership in the convex hull of finitely many rational points, decided without
# rounding: a point lies in the hull iff it is a nonnegative affine combination of
# some affinely independent subset (at most dim + 1 points), and each candidate
# subset is solved by Gaussian elimination over Fractions.

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

from models.exceptions import DomainError

Exponent = Union[int, float, str, Fraction]


def as_fraction(value: Exponent) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (floats read through their repr)"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"cannot read {value!r} as a rational number") from e


def exponent_reciprocal(p: Exponent) -> Fraction:
    """1/p for an exponent p > 0, with 'inf' mapped to 0"""
    if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "∞"):
        return Fraction(0)
    if isinstance(p, float) and p == float("inf"):
        return Fraction(0)
    value = as_fraction(p)
    if value <= 0:
        raise DomainError(f"exponent must be positive, got {p!r}")
    return 1 / value


def _solve_unique(columns: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Unique solution of sum_c x_c * columns[c] = rhs, or None if inconsistent or not unique"""
    n_rows = len(rhs)
    n_cols = len(columns)
    rows = [[Fraction(columns[c][r]) for c in range(n_cols)] + [Fraction(rhs[r])] for r in range(n_rows)]
    pivot_row = 0
    for col in range(n_cols):
        found = next((r for r in range(pivot_row, n_rows) if rows[r][col] != 0), None)
        if found is None:
            return None
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        pivot = rows[pivot_row][col]
        rows[pivot_row] = [entry / pivot for entry in rows[pivot_row]]
        for r in range(n_rows):
            if r != pivot_row and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[pivot_row])]
        pivot_row += 1
    # Leftover rows must read 0 = 0.
    if any(rows[r][-1] != 0 for r in range(pivot_row, n_rows)):
        return None
    return [rows[i][-1] for i in range(n_cols)]


@dataclass(frozen=True)
class ExactHull:
    """Convex hull of rational points in Q^dim"""
    vertices: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.vertices:
            raise DomainError("a hull needs at least one vertex")
        if len({len(v) for v in self.vertices}) != 1:
            raise DomainError("hull vertices must share one dimension")

    @classmethod
    def of(cls, points: Sequence[Sequence[Exponent]]) -> 'ExactHull':
        return cls(tuple(tuple(as_fraction(x) for x in point) for point in points))

    @property
    def dimension(self) -> int:
        return len(self.vertices[0])

    def barycentric(self, point: Sequence[Exponent]) -> Optional[Tuple[Tuple[int, ...], List[Fraction]]]:
        """Vertex subset and nonnegative weights expressing the point, or None if it is outside"""
        target = [as_fraction(x) for x in point]
        if len(target) != self.dimension:
            raise DomainError(f"point has dimension {len(target)}, hull has {self.dimension}")
        rhs = target + [Fraction(1)]
        for size in range(1, min(len(self.vertices), self.dimension + 1) + 1):
            for subset in combinations(range(len(self.vertices)), size):
                columns = [list(self.vertices[i]) + [Fraction(1)] for i in subset]
                weights = _solve_unique(columns, rhs)
                if weights is not None and all(w >= 0 for w in weights):
                    return subset, weights
        return None

    def contains(self, point: Sequence[Exponent]) -> bool:
        return self.barycentric(point) is not None

    def to_dict(self) -> dict:
        return {"vertices": [[str(x) for x in v] for v in self.vertices]}


@dataclass(frozen=True)
class HalfPlane:
    """a*x + b*y <= c, or < c when strict"""
    a: Fraction
    b: Fraction
    c: Fraction
    strict: bool = False

    def holds(self, x: Fraction, y: Fraction) -> bool:
        lhs = self.a * x + self.b * y
        return lhs < self.c if self.strict else lhs <= self.c

    def to_dict(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "c": str(self.c), "strict": self.strict}
