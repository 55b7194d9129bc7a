"""JSON container for weighted polygons and invariant lists.

A document is a UTF-8 JSON object::

    {"format_version": "1",
     "weighted_polygon": {"polygon": [["0", "0"], ...],
                          "cuts": [{"lambda": "1/2", "epsilon": 1, "k": 0}, ...]},
     "metadata": {...}}

or the same with ``"invariant_list"`` in place of ``"weighted_polygon"``.
Cut entries may carry a twisting index ``k`` or a mark height ``mark_y``
(not both, and either on every cut or on none).  Pondered and marked
polygons are written with ``"kind": "pondered"`` or ``"kind": "marked"`` so
that they survive a round trip even without cuts; on input the kind may be
left out and is then inferred from the cut entries.  Rationals are strings, so
serialization is exact; floats only occur in Taylor coefficients.
Loading goes through the ordinary constructors, so anything that loads is
valid.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Union

from .geometry import ConvexPolygon, Point2, as_rational, format_rational
from .equivalence import InvariantList
from .taylor import FormalSeries2
from .weighted import (
    Cut,
    MarkedWeightedPolygon,
    PonderedWeightedPolygon,
    WeightedPolygon,
)

__all__ = [
    "FORMAT_VERSION",
    "Document",
    "ParseError",
    "loads",
    "load",
    "dumps",
    "weighted_to_json",
    "weighted_from_json",
    "invariant_list_to_json",
    "invariant_list_from_json",
]

FORMAT_VERSION = "1"

Body = Union[WeightedPolygon, PonderedWeightedPolygon, MarkedWeightedPolygon, InvariantList]


class ParseError(ValueError):
    """The input is not well-formed JSON or does not follow the document schema."""


@dataclass(frozen=True)
class Document:
    body: Body
    metadata: dict = field(default_factory=dict)
    format_version: str = FORMAT_VERSION


def _int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{what} must be an integer, got {value!r}")
    return value


def _rational(value, what: str):
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise ParseError(f"{what} must be a rational string 'p/q', got {value!r}")
    try:
        return as_rational(value)
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from None


def weighted_to_json(w) -> dict:
    head = {}
    if isinstance(w, PonderedWeightedPolygon):
        head = {"kind": "pondered"}
        base, extra = w.base, [{"k": k} for k in w.indices]
    elif isinstance(w, MarkedWeightedPolygon):
        head = {"kind": "marked"}
        base, extra = w.base, [{"mark_y": format_rational(m.y)} for m in w.marks]
    else:
        base, extra = w, [{} for _ in w.cuts]
    cuts = [
        {"lambda": format_rational(c.lam), "epsilon": c.eps, **e}
        for c, e in zip(base.cuts, extra)
    ]
    return {**head, "polygon": base.delta.to_json(), "cuts": cuts}


def weighted_from_json(data):
    if not isinstance(data, dict) or "polygon" not in data:
        raise ParseError("a weighted polygon needs a 'polygon' array")
    raw_poly = data["polygon"]
    if not isinstance(raw_poly, list):
        raise ParseError("'polygon' must be an array of points")
    points = []
    for n, p in enumerate(raw_poly):
        if not isinstance(p, list) or len(p) != 2:
            raise ParseError(f"polygon vertex {n + 1} must be a two-element array")
        points.append(Point2(_rational(p[0], f"vertex {n + 1} x"), _rational(p[1], f"vertex {n + 1} y")))
    raw_cuts = data.get("cuts", [])
    if not isinstance(raw_cuts, list):
        raise ParseError("'cuts' must be an array")
    cuts, ks, ys = [], [], []
    for n, c in enumerate(raw_cuts):
        if not isinstance(c, dict) or "lambda" not in c or "epsilon" not in c:
            raise ParseError(f"cut {n + 1} needs 'lambda' and 'epsilon'")
        unknown = set(c) - {"lambda", "epsilon", "k", "mark_y"}
        if unknown:
            raise ParseError(f"cut {n + 1}: unknown keys {sorted(unknown)}")
        eps = _int(c["epsilon"], f"cut {n + 1} epsilon")
        cuts.append((_rational(c["lambda"], f"cut {n + 1} lambda"), eps))
        if "k" in c:
            ks.append(_int(c["k"], f"cut {n + 1} k"))
        if "mark_y" in c:
            ys.append(_rational(c["mark_y"], f"cut {n + 1} mark_y"))
    if ks and ys:
        raise ParseError("cuts carry both twisting indices and marks; use one per document")
    if len(ks) not in (0, len(cuts)) or len(ys) not in (0, len(cuts)):
        raise ParseError("'k' / 'mark_y' must be given on every cut or on none")
    inferred = "pondered" if ks else "marked" if ys else None
    kind = data.get("kind", inferred)
    if kind not in (None, "pondered", "marked"):
        raise ParseError(f"unknown kind {kind!r}; expected 'pondered' or 'marked'")
    if cuts and kind != inferred:
        raise ParseError(f"kind {kind!r} does not match the cut entries")
    base = WeightedPolygon(ConvexPolygon(tuple(points)), tuple(Cut(lam, e) for lam, e in cuts))
    if kind == "pondered":
        return PonderedWeightedPolygon(base, tuple(ks))
    if kind == "marked":
        return MarkedWeightedPolygon(base, tuple(Point2(c.lam, y) for c, y in zip(base.cuts, ys)))
    return base


def invariant_list_to_json(inv: InvariantList) -> dict:
    return {
        "m_f": inv.m_f,
        "taylor": [s.to_json() for s in inv.taylor],
        "polygon": weighted_to_json(inv.polygon),
        "heights": [format_rational(h) for h in inv.heights],
        "twisting": weighted_to_json(inv.twisting),
    }


def invariant_list_from_json(data) -> InvariantList:
    if not isinstance(data, dict):
        raise ParseError("an invariant list must be an object")
    missing = {"m_f", "taylor", "polygon", "heights", "twisting"} - set(data)
    if missing:
        raise ParseError(f"invariant list is missing {sorted(missing)}")
    polygon = weighted_from_json(data["polygon"])
    if not isinstance(polygon, WeightedPolygon):
        raise ParseError("'polygon' must be a plain weighted polygon (no k or mark_y)")
    twisting = weighted_from_json(data["twisting"])
    if not isinstance(twisting, PonderedWeightedPolygon):
        if type(twisting) is WeightedPolygon and twisting.complexity == 0:
            twisting = PonderedWeightedPolygon(twisting, ())
        else:
            raise ParseError("'twisting' must carry a twisting index 'k' on every cut")
    if not isinstance(data["taylor"], list) or not isinstance(data["heights"], list):
        raise ParseError("'taylor' and 'heights' must be arrays")
    try:
        taylor = tuple(FormalSeries2.from_json(s) for s in data["taylor"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed Taylor series: {exc}") from None
    heights = tuple(_rational(h, f"height {n + 1}") for n, h in enumerate(data["heights"]))
    return InvariantList(_int(data["m_f"], "m_f"), taylor, polygon, heights, twisting)


def to_json(doc: Document) -> dict:
    if isinstance(doc.body, InvariantList):
        key, payload = "invariant_list", invariant_list_to_json(doc.body)
    else:
        key, payload = "weighted_polygon", weighted_to_json(doc.body)
    out = {"format_version": doc.format_version, key: payload}
    if doc.metadata:
        out["metadata"] = dict(doc.metadata)
    return out


# two-string arrays (points) stay on one line
_PAIR = re.compile(r'\[\s+("[^"\\]*"),\s+("[^"\\]*")\s+\]')


def dumps(doc: Document) -> str:
    text = json.dumps(to_json(doc), indent=2, ensure_ascii=False)
    return _PAIR.sub(r"[\1, \2]", text) + "\n"


def loads(text: str) -> Document:
    """Parse and validate a document.

    Syntax and schema problems raise :class:`ParseError` (with line and column
    for JSON syntax); invariant violations raise the constructors' errors.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError("document must be a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}; expected {FORMAT_VERSION!r}")
    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise ParseError("'metadata' must map strings to strings")
    kinds = [k for k in ("weighted_polygon", "invariant_list") if k in data]
    if len(kinds) != 1:
        raise ParseError("document needs exactly one of 'weighted_polygon' or 'invariant_list'")
    if kinds[0] == "invariant_list":
        body = invariant_list_from_json(data["invariant_list"])
    else:
        body = weighted_from_json(data["weighted_polygon"])
    return Document(body, metadata, version)


def load(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
