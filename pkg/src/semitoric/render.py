"""Deterministic SVG drawings of weighted polygons.

The polygon outline is drawn as a single path; each cut is a dashed vertical
half-line from its mark (or from the chord midpoint when there are no marks)
up to the boundary for ``eps = +1`` and down for ``eps = -1``.  Output is a
pure function of the input and the :class:`RenderSpec`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .equivalence import InvariantList
from .geometry import ConvexPolygon
from .weighted import (
    MarkedWeightedPolygon,
    PonderedWeightedPolygon,
    WeightedPolygon,
)

__all__ = ["RenderSpec", "render_svg", "Scene", "scene_of"]

MARGIN = 0.05


@dataclass(frozen=True)
class RenderSpec:
    width: int = 400
    height: int = 400
    show_marks: bool = True
    show_indices: bool = True
    show_cuts: bool = True

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("render dimensions must be positive")


@dataclass(frozen=True)
class Scene:
    delta: ConvexPolygon
    cuts: tuple  # of Cut
    marks: Optional[tuple[Fraction, ...]] = None
    indices: Optional[tuple[int, ...]] = None


def scene_of(body) -> Scene:
    if isinstance(body, InvariantList):
        tw = body.twisting
        marked = MarkedWeightedPolygon.from_heights(tw.base, body.heights)
        return Scene(tw.base.delta, tw.base.cuts, tuple(m.y for m in marked.marks), tw.indices)
    if isinstance(body, PonderedWeightedPolygon):
        return Scene(body.base.delta, body.base.cuts, None, body.indices)
    if isinstance(body, MarkedWeightedPolygon):
        return Scene(body.base.delta, body.base.cuts, tuple(m.y for m in body.marks), None)
    if isinstance(body, WeightedPolygon):
        return Scene(body.delta, body.cuts)
    raise TypeError(f"cannot render {type(body).__name__}")


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def render_svg(body, spec: RenderSpec = RenderSpec()) -> str:
    scene = scene_of(body)
    verts = scene.delta.vertices
    xmin, xmax = scene.delta.x_range()
    ymin, ymax = min(p.y for p in verts), max(p.y for p in verts)
    span_x, span_y = float(xmax - xmin), float(ymax - ymin)
    inner_w, inner_h = spec.width * (1 - 2 * MARGIN), spec.height * (1 - 2 * MARGIN)
    scale = min(inner_w / span_x, inner_h / span_y)
    off_x = (spec.width - scale * span_x) / 2
    off_y = (spec.height - scale * span_y) / 2

    def px(x) -> str:
        return _fmt(off_x + scale * float(x - xmin))

    def py(y) -> str:
        return _fmt(spec.height - off_y - scale * float(y - ymin))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">',
    ]
    d = " ".join(f"{'M' if i == 0 else 'L'} {px(p.x)} {py(p.y)}" for i, p in enumerate(verts))
    lines.append(
        f'  <path class="polygon" d="{d} Z" fill="#e8eef7" stroke="#000000" stroke-width="1.5"/>'
    )
    anchors = _anchors(scene)
    if spec.show_cuts:
        for cut, y0 in zip(scene.cuts, anchors):
            lo, hi = scene.delta.vertical_chord(cut.lam)
            y1 = hi if cut.eps == 1 else lo
            lines.append(
                f'  <line class="cut" x1="{px(cut.lam)}" y1="{py(y0)}" x2="{px(cut.lam)}" '
                f'y2="{py(y1)}" stroke="#000000" stroke-width="1" stroke-dasharray="4 3"/>'
            )
    if spec.show_marks and scene.marks is not None:
        for cut, y in zip(scene.cuts, scene.marks):
            lines.append(
                f'  <circle class="mark" cx="{px(cut.lam)}" cy="{py(y)}" r="3" fill="#000000"/>'
            )
    if spec.show_indices and scene.indices is not None:
        for cut, y, k in zip(scene.cuts, anchors, scene.indices):
            lines.append(
                f'  <text class="index" x="{_fmt(float(px(cut.lam)) + 5)}" '
                f'y="{_fmt(float(py(y)) - 5)}" font-family="sans-serif" font-size="12">'
                f"k={k}</text>"
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _anchors(scene: Scene) -> Sequence[Fraction]:
    if scene.marks is not None:
        return scene.marks
    out = []
    for cut in scene.cuts:
        lo, hi = scene.delta.vertical_chord(cut.lam)
        out.append((lo + hi) / 2)
    return out
