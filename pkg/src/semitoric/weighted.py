"""Weighted polygons, their pondered and marked variants, and the group action.

A weighted polygon of complexity ``s`` is a convex polygon together with
``s`` vertical cut lines strictly inside its x-range, each carrying a sign
(the direction, up or down, of the half-line cut through the focus-focus
value).  The group ``{+-1}^s x {T^k}`` acts by flipping signs and shearing.

Flipping the sign of cut ``i`` from ``eps`` to ``-eps`` bends the polygon by
``t^{eps}`` along that line: ``u_i = eps_i * (1 - eps'_i) / 2`` where
``eps'`` is the flip vector of the group element.  A flip is only possible
when the polygon has enough of a corner on that line to stay convex
afterwards (see :meth:`WeightedPolygon.flippable`); for polygons coming from
an actual system this always holds, but arbitrary convex data may violate
it, in which case :func:`act` raises :class:`ActionError`.

Indices are 0-based throughout the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .affine import PiecewiseAffineMap, apply_map, apply_map_polygon
from .geometry import ConvexPolygon, GeometryError, Point2, as_rational

__all__ = [
    "Cut",
    "WeightedPolygon",
    "PonderedWeightedPolygon",
    "MarkedWeightedPolygon",
    "GroupElement",
    "ActionError",
    "act",
    "act_pondered",
    "act_marked",
    "action_map",
    "height",
    "heights",
]


class ActionError(ValueError):
    """A group element cannot act on the given weighted polygon."""


def _check_sign(eps) -> int:
    if eps not in (1, -1) or isinstance(eps, bool):
        raise GeometryError(f"sign must be +1 or -1, got {eps!r}")
    return int(eps)


@dataclass(frozen=True, order=True)
class Cut:
    lam: Fraction
    eps: int

    def __post_init__(self):
        object.__setattr__(self, "lam", as_rational(self.lam))
        object.__setattr__(self, "eps", _check_sign(self.eps))


@dataclass(frozen=True)
class WeightedPolygon:
    delta: ConvexPolygon
    cuts: tuple[Cut, ...] = ()

    def __post_init__(self):
        cuts = tuple(c if isinstance(c, Cut) else Cut(*c) for c in self.cuts)
        object.__setattr__(self, "cuts", cuts)
        xmin, xmax = self.delta.x_range()
        for j, (a, b) in enumerate(zip(cuts, cuts[1:])):
            if not a.lam < b.lam:
                raise GeometryError(
                    f"cut-order: lambda_{j + 1} = {a.lam} must be < lambda_{j + 2} = {b.lam}"
                )
        if cuts and not xmin < cuts[0].lam:
            raise GeometryError(
                f"cut-inside: lambda_1 = {cuts[0].lam} must be strictly greater than "
                f"min x of the polygon ({xmin})"
            )
        if cuts and not cuts[-1].lam < xmax:
            raise GeometryError(
                f"cut-inside: lambda_{len(cuts)} = {cuts[-1].lam} must be strictly less than "
                f"max x of the polygon ({xmax})"
            )

    @property
    def complexity(self) -> int:
        return len(self.cuts)

    @property
    def lambdas(self) -> tuple[Fraction, ...]:
        return tuple(c.lam for c in self.cuts)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(c.eps for c in self.cuts)

    def flippable(self, i: int) -> bool:
        """Whether cut ``i`` can change sign while keeping the polygon convex.

        An upward cut needs the upper boundary to bend down by at least 1 on
        its line, a downward cut needs the lower boundary to bend up by at
        least 1.  The property is preserved by the whole group action.
        """
        c = self.cuts[i]
        if c.eps == 1:
            return self.delta.upper_kink(c.lam) >= 1
        return self.delta.lower_kink(c.lam) >= 1

    def is_admissible(self) -> bool:
        """Every cut is flippable, so the full group acts."""
        return all(self.flippable(i) for i in range(self.complexity))


@dataclass(frozen=True)
class PonderedWeightedPolygon:
    base: WeightedPolygon
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(self.indices)
        for k in idx:
            if isinstance(k, bool) or not isinstance(k, int):
                raise TypeError(f"twisting index must be an int, got {k!r}")
        if len(idx) != self.base.complexity:
            raise GeometryError(
                f"index-count: {len(idx)} twisting indices for complexity {self.base.complexity}"
            )
        object.__setattr__(self, "indices", idx)

    @property
    def complexity(self) -> int:
        return self.base.complexity


@dataclass(frozen=True)
class MarkedWeightedPolygon:
    """Weighted polygon with the image of each focus-focus point on its cut line."""

    base: WeightedPolygon
    marks: tuple[Point2, ...]

    def __post_init__(self):
        marks = tuple(m if isinstance(m, Point2) else Point2(*m) for m in self.marks)
        object.__setattr__(self, "marks", marks)
        if len(marks) != self.base.complexity:
            raise GeometryError(
                f"mark-count: {len(marks)} marks for complexity {self.base.complexity}"
            )
        for i, (m, c) in enumerate(zip(marks, self.base.cuts)):
            if m.x != c.lam:
                raise GeometryError(f"mark-on-line: mark {i + 1} has x = {m.x}, expected {c.lam}")
            lo, hi = self.base.delta.vertical_chord(c.lam)
            if not lo < m.y < hi:
                raise GeometryError(
                    f"mark-interior: mark {i + 1} at y = {m.y} is not in the interior "
                    f"of the polygon (chord {lo} .. {hi})"
                )

    @classmethod
    def from_heights(cls, base: WeightedPolygon, hs: Sequence) -> "MarkedWeightedPolygon":
        marks = tuple(
            Point2(c.lam, base.delta.lower_boundary(c.lam) + as_rational(h))
            for c, h in zip(base.cuts, hs)
        )
        return cls(base, marks)

    @property
    def complexity(self) -> int:
        return self.base.complexity


@dataclass(frozen=True)
class GroupElement:
    """An element ``(eps', T^k)`` of ``{+-1}^s x {T^k}``."""

    flips: tuple[int, ...]
    shear: int = 0

    def __post_init__(self):
        object.__setattr__(self, "flips", tuple(_check_sign(e) for e in self.flips))
        if isinstance(self.shear, bool) or not isinstance(self.shear, int):
            raise TypeError(f"shear must be an int, got {self.shear!r}")

    @classmethod
    def identity(cls, s: int) -> "GroupElement":
        return cls((1,) * s, 0)

    @property
    def size(self) -> int:
        return len(self.flips)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if self.size != other.size:
            raise ValueError("group elements of different complexity")
        return GroupElement(
            tuple(a * b for a, b in zip(self.flips, other.flips)), self.shear + other.shear
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.flips, -self.shear)


def action_map(g: GroupElement, w: WeightedPolygon) -> PiecewiseAffineMap:
    """The point map by which ``g`` moves ``w``: ``t_u o T^k``."""
    if g.size != w.complexity:
        raise ActionError(
            f"group element has {g.size} sign flips but the polygon has complexity {w.complexity}"
        )
    cuts = tuple(
        (c.lam, c.eps * (1 - f) // 2) for c, f in zip(w.cuts, g.flips)
    )
    return PiecewiseAffineMap(g.shear, cuts)


def act(g: GroupElement, w: WeightedPolygon) -> WeightedPolygon:
    m = action_map(g, w)
    for i, f in enumerate(g.flips):
        if f == -1 and not w.flippable(i):
            raise ActionError(
                f"cut {i + 1} (lambda = {w.cuts[i].lam}) cannot be flipped: the polygon "
                "has no corner of integral size >= 1 on that line"
            )
    delta = apply_map_polygon(m, w.delta)
    cuts = tuple(Cut(c.lam, c.eps * f) for c, f in zip(w.cuts, g.flips))
    return WeightedPolygon(delta, cuts)


def act_pondered(g: GroupElement, p: PonderedWeightedPolygon) -> PonderedWeightedPolygon:
    return PonderedWeightedPolygon(act(g, p.base), tuple(k + g.shear for k in p.indices))


def act_marked(g: GroupElement, w: MarkedWeightedPolygon) -> MarkedWeightedPolygon:
    m = action_map(g, w.base)
    return MarkedWeightedPolygon(act(g, w.base), tuple(apply_map(m, p) for p in w.marks))


def height(w: MarkedWeightedPolygon, i: int) -> Fraction:
    """Vertical distance from mark ``i`` down to the bottom of the polygon."""
    if not 0 <= i < w.complexity:
        raise IndexError(f"cut index {i} out of range for complexity {w.complexity}")
    m = w.marks[i]
    return m.y - w.base.delta.lower_boundary(m.x)


def heights(w: MarkedWeightedPolygon) -> tuple[Fraction, ...]:
    return tuple(height(w, i) for i in range(w.complexity))
