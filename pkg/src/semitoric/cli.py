"""Command-line interface: ``semitoric {validate,act,compare,render,recover-taylor,canonical}``.

Exit codes: 0 valid / equal, 1 invalid / unequal, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import io
from .equivalence import (
    InvariantList,
    canonical_form,
    canonical_pondered,
    invariant_lists_equal,
    orbits_equal,
    pondered_orbits_equal,
)
from .render import RenderSpec, render_svg
from .taylor import ConditioningError, check_closed, read_samples, recover_series, regularize
from .weighted import (
    GroupElement,
    MarkedWeightedPolygon,
    PonderedWeightedPolygon,
    WeightedPolygon,
    act,
    act_marked,
    act_pondered,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEGREE_ENV = "SEMITORIC_TRUNCATION_DEGREE"


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def default_degree() -> int:
    raw = os.environ.get(DEGREE_ENV)
    if raw is None:
        return 4
    try:
        value = int(raw)
    except ValueError:
        raise _Fail(EXIT_USAGE, f"{DEGREE_ENV}={raw!r} is not an integer") from None
    if value < 1:
        raise _Fail(EXIT_USAGE, f"{DEGREE_ENV} must be >= 1")
    return value


def _load(path: str) -> io.Document:
    try:
        return io.load(path)
    except OSError as exc:
        raise _Fail(EXIT_USAGE, f"{path}: {exc.strerror or exc}") from None
    except io.ParseError as exc:
        raise _Fail(EXIT_USAGE, f"{path}: parse error: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise _Fail(EXIT_FAIL, f"{path}: invalid: {exc}") from None


def _describe(body) -> str:
    if isinstance(body, InvariantList):
        return f"invariant list, m_f = {body.m_f}"
    kind = {
        PonderedWeightedPolygon: "pondered weighted polygon",
        MarkedWeightedPolygon: "marked weighted polygon",
        WeightedPolygon: "weighted polygon",
    }[type(body)]
    return f"{kind}, complexity {body.complexity}"


def cmd_validate(args) -> int:
    doc = _load(args.path)
    print(f"{args.path}: valid ({_describe(doc.body)})")
    return EXIT_OK


def act_on(g: GroupElement, body):
    if isinstance(body, InvariantList):
        return replace(body, polygon=act(g, body.polygon), twisting=act_pondered(g, body.twisting))
    if isinstance(body, PonderedWeightedPolygon):
        return act_pondered(g, body)
    if isinstance(body, MarkedWeightedPolygon):
        return act_marked(g, body)
    return act(g, body)


def _complexity(body) -> int:
    return body.m_f if isinstance(body, InvariantList) else body.complexity


def cmd_act(args) -> int:
    doc = _load(args.path)
    s = _complexity(doc.body)
    flips = [1] * s
    for j in args.flip:
        if not 1 <= j <= s:
            raise _Fail(EXIT_USAGE, f"--flip {j}: cut numbers run from 1 to {s}")
        flips[j - 1] = -flips[j - 1]
    g = GroupElement(tuple(flips), args.shear)
    try:
        body = act_on(g, doc.body)
    except ValueError as exc:
        raise _Fail(EXIT_FAIL, f"cannot act: {exc}") from None
    out = io.dumps(replace(doc, body=body))
    io.loads(out)  # re-validate before emission
    sys.stdout.write(out)
    return EXIT_OK


def cmd_canonical(args) -> int:
    doc = _load(args.path)
    vt = args.modulo_vertical_translation
    body = doc.body
    try:
        if isinstance(body, InvariantList):
            body = replace(
                body,
                polygon=canonical_form(body.polygon, modulo_vertical_translation=vt),
                twisting=canonical_pondered(body.twisting, modulo_vertical_translation=vt),
            )
        elif isinstance(body, PonderedWeightedPolygon):
            body = canonical_pondered(body, modulo_vertical_translation=vt)
        elif isinstance(body, MarkedWeightedPolygon):
            raise _Fail(EXIT_USAGE, "canonical forms are defined for unmarked polygons")
        else:
            body = canonical_form(body, modulo_vertical_translation=vt)
    except ValueError as exc:
        raise _Fail(EXIT_FAIL, f"canonical form failed: {exc}") from None
    sys.stdout.write(io.dumps(replace(doc, body=body)))
    return EXIT_OK


def cmd_compare(args) -> int:
    a, b = _load(args.path_a).body, _load(args.path_b).body
    degree = args.degree if args.degree is not None else default_degree()
    vt = args.modulo_vertical_translation
    if isinstance(a, InvariantList) and isinstance(b, InvariantList):
        result = invariant_lists_equal(
            a, b, degree, tolerance=args.tolerance, modulo_vertical_translation=vt
        )
        for item in result.items:
            print(f"{item.invariant} {'PASS' if item.equal else 'FAIL'} {item.detail}")
        if result.equal:
            print("equal")
            return EXIT_OK
        print(f"not equal: first failing item {result.first_failure}")
        return EXIT_FAIL
    if type(a) is type(b) and isinstance(a, (WeightedPolygon, PonderedWeightedPolygon)):
        if isinstance(a, PonderedWeightedPolygon):
            w = pondered_orbits_equal(a, b, modulo_vertical_translation=vt)
        else:
            w = orbits_equal(a, b, modulo_vertical_translation=vt)
        if w is None:
            print("not equal: different orbits")
            return EXIT_FAIL
        flips = ",".join("+1" if f == 1 else "-1" for f in w.element.flips)
        print(f"equal: witness flips=({flips}) shear={w.element.shear}")
        return EXIT_OK
    raise _Fail(EXIT_USAGE, "compare needs two invariant lists or two polygons of the same kind")


def cmd_render(args) -> int:
    doc = _load(args.path)
    spec = RenderSpec(
        width=args.width,
        height=args.height,
        show_marks=not args.no_marks,
        show_indices=not args.no_indices,
        show_cuts=not args.no_cuts,
    )
    svg = render_svg(doc.body, spec)
    if args.out in (None, "-"):
        sys.stdout.write(svg)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    return EXIT_OK


def cmd_recover_taylor(args) -> int:
    degree = args.degree if args.degree is not None else default_degree()
    try:
        samples = read_samples(args.samples_path)
    except OSError as exc:
        raise _Fail(EXIT_USAGE, f"{args.samples_path}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise _Fail(EXIT_USAGE, f"parse error: {exc}") from None
    branch = math.pi if args.branch == "down" else 0.0
    try:
        field = regularize(samples, branch)
        report = check_closed(field, args.tolerance)
    except ValueError as exc:
        raise _Fail(EXIT_FAIL, f"cannot check closedness: {exc}") from None
    if not report.passed:
        print(json.dumps({"closedness": report.to_json()}, indent=2))
        print(
            f"closedness check failed: residual {report.max_residual:.3e} "
            f"> tolerance {report.tolerance:.3e}",
            file=sys.stderr,
        )
        return EXIT_FAIL
    try:
        rec = recover_series(field, degree, check=False)
    except ConditioningError as exc:
        raise _Fail(EXIT_FAIL, f"recovery failed: {exc}") from None
    rec = replace(rec, closedness=report)
    print(json.dumps(rec.to_json(), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semitoric", description="Symplectic invariants of semitoric systems as exact data."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check every invariant of a document")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("act", help="act by a group element (flips and shear)")
    p.add_argument("path")
    p.add_argument("--flip", type=int, action="append", default=[], metavar="J",
                   help="flip the sign of cut J (1-based); repeatable")
    p.add_argument("--shear", type=int, default=0, metavar="K")
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("compare", help="decide whether two invariant lists are equal")
    p.add_argument("path_a")
    p.add_argument("path_b")
    p.add_argument("--degree", type=int, default=None,
                   help=f"Taylor truncation degree (default ${DEGREE_ENV} or 4)")
    p.add_argument("--tolerance", type=float, default=1e-9,
                   help="absolute tolerance on Taylor coefficients")
    p.add_argument("--modulo-vertical-translation", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("render", help="draw a document as SVG")
    p.add_argument("path")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--width", type=int, default=400)
    p.add_argument("--height", type=int, default=400)
    p.add_argument("--no-marks", action="store_true")
    p.add_argument("--no-indices", action="store_true")
    p.add_argument("--no-cuts", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("recover-taylor", help="recover the Taylor series from period samples")
    p.add_argument("samples_path")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None,
                   help="closedness tolerance (default 10 h^2)")
    p.add_argument("--branch", choices=("up", "down"), default="up",
                   help="log branch: angles in [0, 2pi) (up) or [pi, 3pi) (down)")
    p.set_defaults(func=cmd_recover_taylor)

    p = sub.add_parser("canonical", help="emit the canonical orbit representative")
    p.add_argument("path")
    p.add_argument("--modulo-vertical-translation", action="store_true")
    p.set_defaults(func=cmd_canonical)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "degree", None) is not None and args.degree < 1:
        parser.error("--degree must be >= 1")
    if getattr(args, "width", 1) <= 0 or getattr(args, "height", 1) <= 0:
        parser.error("--width and --height must be positive")
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"semitoric: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
