"""Vertical shears and single-line cuts, and the maps they generate.

Every map here has the form ``(x, y) -> (x, y + k*x + sum n_i * max(0, x - lam_i))``:
x is preserved and each vertical line is translated.  The cut at ``lam``
with weight ``n`` is the identity on ``x <= lam`` and the shear ``T^n``
(with origin on the line) on the right half-plane; since that shear fixes the
line pointwise the choice of origin drops out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .geometry import (
    ConvexityError,
    ConvexPolygon,
    MatGL2Z,
    Point2,
    as_rational,
    format_rational,
)

__all__ = [
    "VerticalLine",
    "PiecewiseAffineMap",
    "apply_Tk",
    "apply_cut",
    "apply_map",
    "apply_map_polygon",
]


@dataclass(frozen=True, order=True)
class VerticalLine:
    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", as_rational(self.lam))

    def contains(self, p: Point2) -> bool:
        return p.x == self.lam


def apply_Tk(k: int, p: Point2) -> Point2:
    return MatGL2Z.shear(k).apply(p)


def apply_cut(lam, n: int, p: Point2) -> Point2:
    """Identity left of (and on) the line ``x = lam``, ``T^n`` to its right."""
    lam = as_rational(lam)
    if p.x <= lam:
        return p
    return Point2(p.x, p.y + n * (p.x - lam))


@dataclass(frozen=True)
class PiecewiseAffineMap:
    """``t_n o T^k``: a global shear followed by cuts along vertical lines.

    ``cuts`` is a tuple of ``(lam, n)`` pairs with strictly increasing
    ``lam``.  Cuts with ``n = 0`` are kept as given; they act trivially.
    """

    shear: int = 0
    cuts: tuple[tuple[Fraction, int], ...] = ()

    def __post_init__(self):
        if isinstance(self.shear, bool) or not isinstance(self.shear, int):
            raise TypeError(f"shear must be an int, got {self.shear!r}")
        cuts = tuple((as_rational(lam), int(n)) for lam, n in self.cuts)
        for (a, _), (b, _) in zip(cuts, cuts[1:]):
            if not a < b:
                raise ValueError(f"cut abscissae must be strictly increasing, got {a} then {b}")
        object.__setattr__(self, "cuts", cuts)

    @classmethod
    def identity(cls) -> "PiecewiseAffineMap":
        return cls()

    def offset(self, x) -> Fraction:
        """Vertical displacement applied on the line at abscissa ``x``."""
        x = as_rational(x)
        total = self.shear * x
        for lam, n in self.cuts:
            if x > lam:
                total += n * (x - lam)
        return total

    def inverse(self) -> "PiecewiseAffineMap":
        return PiecewiseAffineMap(-self.shear, tuple((lam, -n) for lam, n in self.cuts))

    def then(self, other: "PiecewiseAffineMap") -> "PiecewiseAffineMap":
        """The composite ``other o self``; these maps commute, so order is moot."""
        weights: dict[Fraction, int] = {}
        for lam, n in self.cuts + other.cuts:
            weights[lam] = weights.get(lam, 0) + n
        return PiecewiseAffineMap(
            self.shear + other.shear, tuple(sorted(weights.items()))
        )

    def kinks(self) -> Iterable[tuple[Fraction, int]]:
        return ((lam, n) for lam, n in self.cuts if n != 0)

    def to_json(self) -> dict:
        return {
            "shear": self.shear,
            "cuts": [[format_rational(lam), n] for lam, n in self.cuts],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PiecewiseAffineMap":
        return cls(int(data["shear"]), tuple((as_rational(lam), int(n)) for lam, n in data["cuts"]))


def apply_map(m: PiecewiseAffineMap, p: Point2) -> Point2:
    """``T^shear`` first, then the cuts; equal to ``y + m.offset(x)``."""
    return Point2(p.x, p.y + m.offset(p.x))


def apply_map_polygon(m: PiecewiseAffineMap, poly: ConvexPolygon) -> ConvexPolygon:
    """Image of a convex polygon; raises ConvexityError if the image is not convex.

    The map is affine on each vertical slab between kinks, so the image is
    spanned by the images of the vertices and of the chord endpoints on the
    kink lines.  Whether it is convex depends on the polygon: a kink of
    weight ``n`` at ``lam`` needs the upper boundary to bend down by at least
    ``n`` there (``n > 0``), or the lower boundary to bend up by at least
    ``-n`` (``n < 0``).
    """
    xmin, xmax = poly.x_range()
    inner = [lam for lam, _ in m.kinks() if xmin < lam < xmax]
    lower = sorted(set(poly.lower_chain) | {Point2(lam, poly.lower_boundary(lam)) for lam in inner})
    upper = sorted(set(poly.upper_chain) | {Point2(lam, poly.upper_boundary(lam)) for lam in inner})
    ring = lower + [p for p in reversed(upper) if p not in lower]
    image = [apply_map(m, p) for p in ring]
    try:
        return ConvexPolygon(tuple(image))
    except ConvexityError as exc:
        raise ConvexityError(f"image of polygon under {m} is not convex: {exc}") from None
