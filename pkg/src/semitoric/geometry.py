"""Exact planar geometry: rationals, points, integer matrices, convex polygons.

Everything here works over :class:`fractions.Fraction`; no floating point is
ever produced.  Polygons are stored in a canonical form (counterclockwise,
redundant collinear vertices removed, lexicographically smallest vertex
first) so that structural equality is geometric equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational as _RationalABC
from typing import Iterable, Optional, Sequence

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:/(\d+))?\s*$")


class GeometryError(ValueError):
    """Raised when geometric input violates a type invariant."""


class ConvexityError(GeometryError):
    """The vertex list does not describe a strictly convex polygon."""


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: they would silently smuggle rounding into exact code.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"malformed rational {text!r}; expected 'p' or 'p/q'")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` when q = 1)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class Point2:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", as_rational(self.x))
        object.__setattr__(self, "y", as_rational(self.y))

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def cross(self, other: "Point2") -> Fraction:
        return self.x * other.y - self.y * other.x

    def dot(self, other: "Point2") -> Fraction:
        return self.x * other.x + self.y * other.y

    def to_json(self) -> list:
        return [format_rational(self.x), format_rational(self.y)]

    @classmethod
    def from_json(cls, data) -> "Point2":
        if not isinstance(data, (list, tuple)) or len(data) != 2:
            raise ValueError(f"a point must be a two-element array, got {data!r}")
        return cls(as_rational(data[0]), as_rational(data[1]))


@dataclass(frozen=True)
class MatGL2Z:
    """Integer 2x2 matrix ``[[a, b], [c, d]]`` with determinant +-1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise TypeError(f"matrix entry {name} must be an int, got {v!r}")
        if abs(self.det) != 1:
            raise GeometryError(f"determinant {self.det} is not +-1")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls) -> "MatGL2Z":
        return cls(1, 0, 0, 1)

    @classmethod
    def shear(cls, k: int) -> "MatGL2Z":
        """The vertical shear ``[[1, 0], [k, 1]]``; it fixes every vertical line."""
        return cls(1, 0, k, 1)

    def __matmul__(self, other: "MatGL2Z") -> "MatGL2Z":
        return MatGL2Z(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MatGL2Z":
        det = self.det
        return MatGL2Z(self.d * det, -self.b * det, -self.c * det, self.a * det)

    def apply(self, p: Point2) -> Point2:
        return Point2(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)


def orient(a: Point2, b: Point2, c: Point2) -> Fraction:
    """Twice the signed area of triangle abc; > 0 for a left turn."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _strict_hull(points: Iterable[Point2]) -> list[Point2]:
    # Andrew's monotone chain, collinear points dropped.
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts
    lower: list[Point2] = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point2] = []
    for p in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _drop_redundant(vertices: list[Point2]) -> list[Point2]:
    """Remove vertices lying strictly between their cyclic neighbours."""
    verts = list(vertices)
    changed = True
    while changed and len(verts) >= 3:
        changed = False
        n = len(verts)
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            if orient(a, b, c) == 0 and (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y) > 0:
                del verts[i]
                changed = True
                break
    return verts


def _signed_area2(vertices: Sequence[Point2]) -> Fraction:
    n = len(vertices)
    return sum((vertices[i].cross(vertices[(i + 1) % n]) for i in range(n)), Fraction(0))


@dataclass(frozen=True, eq=True)
class ConvexPolygon:
    """A compact, strictly convex polygon with rational vertices.

    The constructor accepts the vertices in either orientation and starting
    anywhere; collinear vertices sitting on an edge are dropped.  Anything
    else that is not a strictly convex simple polygon is rejected.
    """

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        verts = [v if isinstance(v, Point2) else Point2(*v) for v in self.vertices]
        if len(verts) < 3:
            raise ConvexityError(f"a polygon needs at least 3 vertices, got {len(verts)}")
        if len(set(verts)) != len(verts):
            raise ConvexityError("polygon vertices must be distinct")
        area = _signed_area2(verts)
        if area == 0:
            raise ConvexityError("polygon has zero area")
        if area < 0:
            verts.reverse()
        verts = _drop_redundant(verts)
        hull = _strict_hull(verts)
        if len(hull) < 3:
            raise ConvexityError("polygon has zero area")
        start = verts.index(min(verts))
        rotated = verts[start:] + verts[:start]
        if rotated != hull:
            raise ConvexityError("vertices do not form a strictly convex counterclockwise polygon")
        object.__setattr__(self, "vertices", tuple(hull))

    @classmethod
    def hull(cls, points: Iterable) -> "ConvexPolygon":
        """Convex hull of arbitrary points (must span positive area)."""
        pts = [p if isinstance(p, Point2) else Point2(*p) for p in points]
        return cls(tuple(_strict_hull(pts)))

    # -- chains -----------------------------------------------------------

    @cached_property
    def _chains(self) -> tuple[tuple[Point2, ...], tuple[Point2, ...]]:
        v = self.vertices
        xmax = max(p.x for p in v)
        i_right = next(i for i, p in enumerate(v) if p.x == xmax)
        lower = v[: i_right + 1]
        # the upper chain runs from the topmost right vertex back to the topmost left one
        j_right = max(i for i, p in enumerate(v) if p.x == xmax)
        if v[-1].x == v[0].x:
            upper_ccw = list(v[j_right:])
        else:
            upper_ccw = list(v[j_right:]) + [v[0]]
        return tuple(lower), tuple(reversed(upper_ccw))

    @property
    def lower_chain(self) -> tuple[Point2, ...]:
        """Vertices of the lower boundary, left to right."""
        return self._chains[0]

    @property
    def upper_chain(self) -> tuple[Point2, ...]:
        """Vertices of the upper boundary, left to right."""
        return self._chains[1]

    def x_range(self) -> tuple[Fraction, Fraction]:
        xs = [p.x for p in self.vertices]
        return min(xs), max(xs)

    def signed_area(self) -> Fraction:
        return _signed_area2(self.vertices) / 2

    def contains_x(self, x) -> bool:
        xmin, xmax = self.x_range()
        return xmin <= x <= xmax

    def lower_boundary(self, x) -> Fraction:
        return _eval_chain(self.lower_chain, as_rational(x), "lower")

    def upper_boundary(self, x) -> Fraction:
        return _eval_chain(self.upper_chain, as_rational(x), "upper")

    def vertical_chord(self, lam) -> Optional[tuple[Fraction, Fraction]]:
        lam = as_rational(lam)
        if not self.contains_x(lam):
            return None
        return self.lower_boundary(lam), self.upper_boundary(lam)

    def chord_length(self, lam) -> Fraction:
        chord = self.vertical_chord(lam)
        return Fraction(0) if chord is None else chord[1] - chord[0]

    def lower_slopes(self, x) -> tuple[Fraction, Fraction]:
        """Left and right slopes of the lower boundary at an interior abscissa."""
        return _chain_slopes(self.lower_chain, as_rational(x))

    def upper_slopes(self, x) -> tuple[Fraction, Fraction]:
        return _chain_slopes(self.upper_chain, as_rational(x))

    def lower_kink(self, x) -> Fraction:
        """Slope increase of the lower boundary at ``x`` (>= 0 by convexity)."""
        left, right = self.lower_slopes(x)
        return right - left

    def upper_kink(self, x) -> Fraction:
        """Slope decrease of the upper boundary at ``x`` (>= 0 by convexity)."""
        left, right = self.upper_slopes(x)
        return left - right

    def translate(self, dx, dy) -> "ConvexPolygon":
        d = Point2(dx, dy)
        return ConvexPolygon(tuple(p + d for p in self.vertices))

    def to_json(self) -> list:
        return [p.to_json() for p in self.vertices]

    @classmethod
    def from_json(cls, data) -> "ConvexPolygon":
        if not isinstance(data, list):
            raise ValueError("a polygon must be an array of points")
        return cls(tuple(Point2.from_json(p) for p in data))


def _eval_chain(chain: Sequence[Point2], x: Fraction, which: str) -> Fraction:
    if not chain[0].x <= x <= chain[-1].x:
        raise GeometryError(
            f"{which} boundary evaluated at x={x} outside [{chain[0].x}, {chain[-1].x}]"
        )
    if len(chain) == 1:
        return chain[0].y
    for a, b in zip(chain, chain[1:]):
        if a.x <= x <= b.x:
            return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)
    raise AssertionError("unreachable: chain does not cover x")


def _chain_slopes(chain: Sequence[Point2], x: Fraction) -> tuple[Fraction, Fraction]:
    if not chain[0].x < x < chain[-1].x:
        raise GeometryError(f"slopes requested at non-interior abscissa {x}")
    left = right = None
    for a, b in zip(chain, chain[1:]):
        slope = (b.y - a.y) / (b.x - a.x)
        if a.x < x <= b.x:
            left = slope
        if a.x <= x < b.x:
            right = slope
    return left, right


def polygons_equal(p1: ConvexPolygon, p2: ConvexPolygon) -> bool:
    return p1.vertices == p2.vertices
