"""Orbit equality for weighted polygons and equality of full invariant lists.

Two weighted polygons lie in the same orbit when some ``(eps', T^k)`` carries
one onto the other.  The sign part is forced (``eps' = eps2 * eps1``), and
the shear is read off the lower boundary left of the first cut, where the
action is the plain linear map ``y -> y + k x``.  Every positive answer is
re-checked by applying the candidate element, so witnesses are certificates.

Optionally the comparison can also quotient by vertical translations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Optional, Sequence

from .geometry import GeometryError, as_rational
from .taylor import FormalSeries2, series_equal
from .weighted import (
    ActionError,
    GroupElement,
    PonderedWeightedPolygon,
    WeightedPolygon,
    act,
    act_pondered,
)

__all__ = [
    "OrbitWitness",
    "InvariantList",
    "ItemReport",
    "Comparison",
    "ITEMS",
    "solve_shear",
    "orbits_equal",
    "pondered_orbits_equal",
    "canonical_form",
    "canonical_pondered",
    "invariant_lists_equal",
]

ITEMS = ("(i)", "(ii)", "(iii)", "(iv)", "(v)")


@dataclass(frozen=True)
class OrbitWitness:
    element: GroupElement
    verified: bool
    offset: Fraction = Fraction(0)


def _translate(w: WeightedPolygon, dy: Fraction) -> WeightedPolygon:
    if dy == 0:
        return w
    return WeightedPolygon(w.delta.translate(0, dy), w.cuts)


def _probe_points(w: WeightedPolygon) -> tuple[Fraction, Fraction]:
    xmin, xmax = w.delta.x_range()
    right = w.lambdas[0] if w.cuts else xmax
    return xmin, (xmin + right) / 2


def _solve(
    w1: WeightedPolygon, w2: WeightedPolygon, target_signs: Sequence[int], vertical: bool
) -> Optional[tuple[GroupElement, Fraction]]:
    if w1.lambdas != w2.lambdas:
        raise GeometryError(f"cut abscissae differ: {w1.lambdas} vs {w2.lambdas}")
    if len(target_signs) != w1.complexity:
        raise GeometryError("target sign vector has the wrong length")
    if w1.delta.x_range() != w2.delta.x_range():
        return None
    flips = tuple(a * b for a, b in zip(w1.signs, target_signs))
    a, b = _probe_points(w1)
    da = w2.delta.lower_boundary(a) - w1.delta.lower_boundary(a)
    db = w2.delta.lower_boundary(b) - w1.delta.lower_boundary(b)
    k = (db - da) / (b - a)
    if k.denominator != 1:
        return None
    offset = da - k * a
    if offset != 0 and not vertical:
        return None
    return GroupElement(flips, int(k)), offset


def _verify(g: GroupElement, offset: Fraction, w1: WeightedPolygon, w2: WeightedPolygon) -> bool:
    try:
        image = act(g, w1)
    except ActionError:
        return False
    return _translate(image, offset) == w2


def solve_shear(
    w1: WeightedPolygon,
    w2: WeightedPolygon,
    target_signs: Sequence[int],
    *,
    modulo_vertical_translation: bool = False,
) -> Optional[int]:
    """The shear ``k`` taking ``w1`` to ``w2`` once its signs become ``target_signs``."""
    found = _solve(w1, w2, target_signs, modulo_vertical_translation)
    if found is None:
        return None
    g, offset = found
    w2_signed = WeightedPolygon(w2.delta, tuple((c.lam, e) for c, e in zip(w2.cuts, target_signs)))
    return g.shear if _verify(g, offset, w1, w2_signed) else None


def orbits_equal(
    w1: WeightedPolygon, w2: WeightedPolygon, *, modulo_vertical_translation: bool = False
) -> Optional[OrbitWitness]:
    if w1.complexity != w2.complexity or w1.lambdas != w2.lambdas:
        return None
    found = _solve(w1, w2, w2.signs, modulo_vertical_translation)
    if found is None:
        return None
    g, offset = found
    if not _verify(g, offset, w1, w2):
        return None
    return OrbitWitness(g, True, offset)


def pondered_orbits_equal(
    p1: PonderedWeightedPolygon,
    p2: PonderedWeightedPolygon,
    *,
    modulo_vertical_translation: bool = False,
) -> Optional[OrbitWitness]:
    witness = orbits_equal(
        p1.base, p2.base, modulo_vertical_translation=modulo_vertical_translation
    )
    if witness is None:
        return None
    k = witness.element.shear
    if any(b != a + k for a, b in zip(p1.indices, p2.indices)):
        return None
    return witness


def _canonical_element(w: WeightedPolygon, vertical: bool) -> tuple[GroupElement, Fraction]:
    flips = tuple(
        -1 if c.eps == -1 and w.flippable(i) else 1 for i, c in enumerate(w.cuts)
    )
    xmin, _ = w.delta.x_range()
    lower = w.delta.lower_chain
    slope = (lower[1].y - lower[0].y) / (lower[1].x - lower[0].x)
    k = -floor(slope)
    offset = Fraction(0)
    if vertical:
        offset = -(w.delta.lower_boundary(xmin) + k * xmin)
    return GroupElement(flips, k), offset


def canonical_form(w: WeightedPolygon, *, modulo_vertical_translation: bool = False) -> WeightedPolygon:
    """The orbit representative with every flippable cut pointing up.

    The shear is then fixed by making the slope of the leftmost lower edge
    lie in ``[0, 1)``.  With ``modulo_vertical_translation`` the leftmost
    lowest vertex is also moved to height 0.
    """
    g, offset = _canonical_element(w, modulo_vertical_translation)
    return _translate(act(g, w), offset)


def canonical_pondered(
    p: PonderedWeightedPolygon, *, modulo_vertical_translation: bool = False
) -> PonderedWeightedPolygon:
    g, offset = _canonical_element(p.base, modulo_vertical_translation)
    moved = act_pondered(g, p)
    return PonderedWeightedPolygon(_translate(moved.base, offset), moved.indices)


@dataclass(frozen=True)
class InvariantList:
    """The five invariants: count, Taylor series, polygon orbit, heights, twisting orbit.

    The polygon and twisting entries are any representatives of their
    orbits; Taylor series and heights are listed in order of increasing cut
    abscissa.
    """

    m_f: int
    taylor: tuple[FormalSeries2, ...]
    polygon: WeightedPolygon
    heights: tuple[Fraction, ...]
    twisting: PonderedWeightedPolygon

    def __post_init__(self):
        if isinstance(self.m_f, bool) or not isinstance(self.m_f, int) or self.m_f < 0:
            raise GeometryError(f"m_f must be a non-negative integer, got {self.m_f!r}")
        object.__setattr__(self, "taylor", tuple(self.taylor))
        object.__setattr__(self, "heights", tuple(as_rational(h) for h in self.heights))
        for name, n in (
            ("taylor", len(self.taylor)),
            ("heights", len(self.heights)),
            ("polygon cuts", self.polygon.complexity),
            ("twisting cuts", self.twisting.complexity),
        ):
            if n != self.m_f:
                raise GeometryError(f"length: {name} has {n} entries but m_f = {self.m_f}")
        for s in self.taylor:
            if not isinstance(s, FormalSeries2):
                raise TypeError("Taylor entries must be FormalSeries2")
        for i, (h, lam) in enumerate(zip(self.heights, self.polygon.lambdas)):
            chord = self.polygon.delta.chord_length(lam)
            if not 0 < h < chord:
                raise GeometryError(
                    f"height-range: h_{i + 1} = {h} must satisfy 0 < h < {chord} "
                    f"(chord length at lambda = {lam})"
                )
        if orbits_equal(self.polygon, self.twisting.base) is None:
            raise GeometryError(
                "twisting-base: the twisting-index representative is not in the orbit "
                "of the polygon representative"
            )


@dataclass(frozen=True)
class ItemReport:
    invariant: str
    equal: bool
    detail: str

    def to_json(self) -> dict:
        return {"invariant": self.invariant, "equal": self.equal, "detail": self.detail}


@dataclass(frozen=True)
class Comparison:
    items: tuple[ItemReport, ...] = field(default_factory=tuple)

    @property
    def equal(self) -> bool:
        return all(item.equal for item in self.items)

    @property
    def first_failure(self) -> Optional[str]:
        return next((item.invariant for item in self.items if not item.equal), None)

    def __bool__(self) -> bool:
        return self.equal


def invariant_lists_equal(
    a: InvariantList,
    b: InvariantList,
    truncation_degree: int = 4,
    *,
    tolerance: float = 1e-9,
    modulo_vertical_translation: bool = False,
) -> Comparison:
    """Compare two invariant lists item by item.

    Items after a count mismatch are reported unequal without being compared.
    Taylor coefficients are compared up to ``truncation_degree`` within
    ``tolerance``; everything else is exact.
    """
    if truncation_degree < 1:
        raise ValueError("truncation degree must be >= 1")
    vt = modulo_vertical_translation
    if a.m_f != b.m_f:
        skipped = [ItemReport(item, False, "not compared: m_f differs") for item in ITEMS[1:]]
        return Comparison((ItemReport("(i)", False, f"m_f {a.m_f} != {b.m_f}"), *skipped))
    items = [ItemReport("(i)", True, f"m_f = {a.m_f}")]

    bad = [
        i
        for i, (sa, sb) in enumerate(zip(a.taylor, b.taylor))
        if not series_equal(sa, sb, min(truncation_degree, sa.degree, sb.degree), tolerance)
    ]
    if bad:
        items.append(ItemReport("(ii)", False, f"Taylor series {bad[0] + 1} differs"))
    else:
        items.append(ItemReport("(ii)", True, f"equal up to degree {truncation_degree}"))

    w = orbits_equal(a.polygon, b.polygon, modulo_vertical_translation=vt)
    if w is None:
        items.append(ItemReport("(iii)", False, "weighted polygons lie in different orbits"))
    else:
        items.append(ItemReport("(iii)", True, f"witness {_describe(w)}"))

    bad = [i for i, (ha, hb) in enumerate(zip(a.heights, b.heights)) if ha != hb]
    if bad:
        i = bad[0]
        items.append(ItemReport("(iv)", False, f"h_{i + 1}: {a.heights[i]} != {b.heights[i]}"))
    else:
        items.append(ItemReport("(iv)", True, "heights equal"))

    w = pondered_orbits_equal(a.twisting, b.twisting, modulo_vertical_translation=vt)
    if w is None:
        items.append(ItemReport("(v)", False, "pondered polygons lie in different orbits"))
    else:
        items.append(ItemReport("(v)", True, f"witness {_describe(w)}"))
    return Comparison(tuple(items))


def _describe(w: OrbitWitness) -> str:
    flips = ",".join("+1" if f == 1 else "-1" for f in w.element.flips)
    text = f"flips=({flips}) shear={w.element.shear}"
    if w.offset:
        text += f" offset={w.offset}"
    return text
