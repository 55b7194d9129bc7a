"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` to see the summary lines.
"""

import random
import time
from dataclasses import replace
from fractions import Fraction as F

import numpy as np
import pytest

from semitoric import io
from semitoric.affine import PiecewiseAffineMap, apply_cut, apply_map, apply_map_polygon
from semitoric.cli import main
from semitoric.equivalence import InvariantList, canonical_form, orbits_equal
from semitoric.geometry import ConvexPolygon, Point2
from semitoric.taylor import (
    TWO_PI,
    FormalSeries2,
    annulus_grid,
    check_closed,
    recover_series,
    regularize,
    synthesize_samples,
)
from semitoric.weighted import (
    Cut,
    GroupElement,
    PonderedWeightedPolygon,
    WeightedPolygon,
    act,
    act_marked,
    act_pondered,
    action_map,
    heights,
)

from gen import DEN, brute_force_orbit, random_element, random_marked, random_weighted
from test_golden import CASES, expected_path, run_case


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})")
    return emit


# -- 1. group-action laws -----------------------------------------------------


def test_criterion_1_action_laws(report):
    rng = random.Random(101)
    start = time.perf_counter()
    failures = 0
    for _ in range(1000):
        w = random_weighted(rng)
        s = w.complexity
        g, h = random_element(rng, s), random_element(rng, s)
        ok = act(GroupElement.identity(s), w) == w
        ok &= act(h, act(g, w)) == act(h * g, w)
        failures += not ok
    elapsed = time.perf_counter() - start
    passed = failures == 0 and elapsed < 10.0
    report(1, "group-action identity and compatibility", passed,
           f"1000 cases, {failures} failures, {elapsed:.1f} s")
    assert passed


# -- 2. heights ---------------------------------------------------------------


def test_criterion_2_height_invariance(report):
    rng = random.Random(202)
    failures = 0
    for _ in range(1000):
        w = random_marked(rng)
        g = random_element(rng, w.complexity)
        before, after = heights(w), heights(act_marked(g, w))
        failures += not (before == after and all(type(h) is F for h in after))
    report(2, "heights invariant under the action", failures == 0, f"1000 cases, {failures} failures")
    assert failures == 0


# -- 3. orbit decision vs brute force ---------------------------------------------


def _perturb(rng, w):
    """A small change to ``w``: vertical shift, a sign flipped in place, or a raised top vertex."""
    kind = rng.randrange(3) if w.complexity else rng.choice((0, 2))
    if kind == 0:
        return WeightedPolygon(w.delta.translate(0, F(1, DEN)), w.cuts)
    if kind == 1:
        i = rng.randrange(w.complexity)
        cuts = tuple(Cut(c.lam, -c.eps) if j == i else c for j, c in enumerate(w.cuts))
        return WeightedPolygon(w.delta, cuts)
    top = max(w.delta.vertices, key=lambda p: (p.y, p.x))
    moved = [Point2(p.x, p.y + F(1, DEN)) if p == top else p for p in w.delta.vertices]
    return WeightedPolygon(ConvexPolygon.hull(moved), w.cuts)


def test_criterion_3_orbit_decision(report):
    rng = random.Random(303)
    agree = witnessed = positives = 0
    for n in range(500):
        w1 = random_weighted(rng)
        w2 = act(random_element(rng, w1.complexity, kmax=8), w1)
        if n % 2:
            w2 = _perturb(rng, w2)
        fast = orbits_equal(w1, w2)
        slow = brute_force_orbit(w1, w2, kmax=8)
        agree += (fast is None) == (slow is None)
        if fast is not None:
            positives += 1
            witnessed += fast.verified and act(fast.element, w1) == w2
    passed = agree == 500 and witnessed == positives
    report(3, "orbits_equal agrees with brute force", passed,
           f"{agree}/500 agree, {witnessed}/{positives} witnesses verify")
    assert passed


# -- 4. canonical forms -------------------------------------------------------


def test_criterion_4_canonical_forms(report):
    rng = random.Random(404)
    constant = separated = distinct_pairs = 0
    for n in range(500):
        w = random_weighted(rng)
        g = random_element(rng, w.complexity, kmax=8)
        c = canonical_form(w)
        constant += canonical_form(act(g, w)) == c
        if n % 2 == 0:
            other = _perturb(rng, act(g, w))
            if brute_force_orbit(w, other) is None:
                distinct_pairs += 1
                separated += canonical_form(other) != c
    passed = constant == 500 and separated == distinct_pairs and distinct_pairs > 0
    report(4, "canonical form constant on orbits and separating", passed,
           f"{constant}/500 constant, {separated}/{distinct_pairs} distinct orbits separated")
    assert passed


# -- 5. invariant list comparison through the CLI ---------------------------------


def _random_series(rng):
    coeffs = {(i, d - i): rng.uniform(-1, 1) for d in range(1, 5) for i in range(d + 1)}
    coeffs[(0, 1)] = rng.uniform(0, TWO_PI)
    return FormalSeries2(4, coeffs)


def _random_invariant_list(rng):
    w = random_weighted(rng, s=rng.randint(1, 3))
    hs = []
    for c in w.cuts:
        hs.append(w.delta.chord_length(c.lam) * F(rng.randint(1, DEN - 1), DEN))
    twisting = PonderedWeightedPolygon(w, tuple(rng.randint(-4, 4) for _ in w.cuts))
    return InvariantList(w.complexity, tuple(_random_series(rng) for _ in w.cuts), w, tuple(hs), twisting)


def _drop_last_cut(inv):
    def drop(w):
        return WeightedPolygon(w.delta, w.cuts[:-1])
    tw = inv.twisting
    return InvariantList(
        inv.m_f - 1, inv.taylor[:-1], drop(inv.polygon), inv.heights[:-1],
        PonderedWeightedPolygon(drop(tw.base), tw.indices[:-1]),
    )


def _perturb_item(inv, item, rng):
    if item == "(ii)":
        i = rng.randrange(inv.m_f)
        s = inv.taylor[i]
        bumped = FormalSeries2(s.degree, {**s.coefficients, (1, 0): s[(1, 0)] + 1e-6})
        return replace(inv, taylor=inv.taylor[:i] + (bumped,) + inv.taylor[i + 1:])
    if item == "(iii)":
        # the twisting base must stay in the polygon's orbit, so both move
        dy = F(1, DEN)
        tw = inv.twisting
        return replace(
            inv,
            polygon=WeightedPolygon(inv.polygon.delta.translate(0, dy), inv.polygon.cuts),
            twisting=PonderedWeightedPolygon(WeightedPolygon(tw.base.delta.translate(0, dy), tw.base.cuts), tw.indices),
        )
    if item == "(iv)":
        i = rng.randrange(inv.m_f)
        h = inv.heights[i]
        step = F(1, DEN * DEN)
        h = h + step if h + step < inv.polygon.delta.chord_length(inv.polygon.cuts[i].lam) else h - step
        return replace(inv, heights=inv.heights[:i] + (h,) + inv.heights[i + 1:])
    i = rng.randrange(inv.m_f)
    k = list(inv.twisting.indices)
    k[i] += 1
    return replace(inv, twisting=PonderedWeightedPolygon(inv.twisting.base, tuple(k)))


def _compare(tmp_path, a, b, capsys):
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    pa.write_text(io.dumps(io.Document(a)))
    pb.write_text(io.dumps(io.Document(b)))
    code = main(["compare", str(pa), str(pb)])
    return code, capsys.readouterr().out.splitlines()[-1]


def test_criterion_5_invariant_lists(report, tmp_path, capsys):
    rng = random.Random(505)
    items = ["(i)", "(ii)", "(iii)", "(iv)", "(v)"]
    wrong = []
    for n in range(200):
        a = _random_invariant_list(rng)
        g, h = random_element(rng, a.m_f), random_element(rng, a.m_f)
        b = replace(a, polygon=act(g, a.polygon), twisting=act_pondered(h, a.twisting))
        code, last = _compare(tmp_path, a, b, capsys)
        if code != 0 or last != "equal":
            wrong.append((n, "equal", last))
        item = items[n % 5]
        # a cut can only be dropped where both representatives agree, i.e. from a
        perturbed = _drop_last_cut(a) if item == "(i)" else _perturb_item(b, item, rng)
        code, last = _compare(tmp_path, a, perturbed, capsys)
        if code != 1 or last != f"not equal: first failing item {item}":
            wrong.append((n, item, last))
    report(5, "compare accepts acted lists and names the perturbed item", not wrong,
           f"200 trials, {len(wrong)} misclassifications")
    assert not wrong, wrong[:5]


# -- 6. Taylor round trip ------------------------------------------------------


def test_criterion_6_taylor_round_trip(report):
    rng = np.random.default_rng(606)
    start = time.perf_counter()
    worst_error, ratios = 0.0, []
    coarse_grid, fine_grid = annulus_grid(0.1, 0.005), annulus_grid(0.1, 0.0025)
    for _ in range(50):
        planted = {(i, d - i): float(rng.uniform(-1, 1)) for d in range(1, 5) for i in range(d + 1)}
        planted[(0, 1)] = float(rng.uniform(0, TWO_PI))
        field = regularize(synthesize_samples(planted, coarse_grid))
        rec = recover_series(field, 4)
        worst_error = max(worst_error, max(abs(rec.series[k] - v) for k, v in planted.items()))
        fine = check_closed(regularize(synthesize_samples(planted, fine_grid)))
        ratios.append(rec.closedness.max_residual / fine.max_residual)
    elapsed = time.perf_counter() - start
    passed = worst_error <= 1e-6 and all(3.0 <= r <= 6.0 for r in ratios) and elapsed < 30.0
    report(6, "Taylor series recovered from planted periods", passed,
           f"50 series, max error {worst_error:.1e}, closedness ratio "
           f"{min(ratios):.2f}..{max(ratios):.2f}, {elapsed:.1f} s")
    assert passed


# -- 7. piecewise-affine engine --------------------------------------------------


def test_criterion_7_piecewise_affine(report):
    rng = random.Random(707)
    failures = 0
    for _ in range(1000):
        w = random_weighted(rng)
        g = random_element(rng, w.complexity)
        m = action_map(g, w)
        xmin, xmax = w.delta.x_range()
        p = Point2(xmin + (xmax - xmin) * F(rng.randint(0, 144), 144), F(rng.randint(-100, 100), DEN))
        ok = apply_map(PiecewiseAffineMap(0, tuple((lam, 0) for lam in w.lambdas)), p) == p
        for lam, n in m.cuts:
            # left branch (identity) and right-branch formula agree on the line
            y = F(rng.randint(-100, 100), DEN)
            ok &= apply_cut(lam, n, Point2(lam, y)) == Point2(lam, y + n * (lam - lam))
        image = apply_map_polygon(m, w.delta)
        for _ in range(100):
            x = xmin + (xmax - xmin) * F(rng.randint(0, 1200), 1200)
            ok &= image.chord_length(x) == w.delta.chord_length(x)
        ok &= apply_map(m.inverse(), apply_map(m, p)) == p
        ok &= apply_map_polygon(m.inverse(), image) == w.delta
        failures += not ok
    report(7, "piecewise-affine identities, continuity, chords, inverses", failures == 0,
           f"1000 cases, {failures} failures")
    assert failures == 0


# -- 8. golden files ----------------------------------------------------------


def test_criterion_8_golden_files(report, capsys):
    mismatched = []
    for name in sorted(CASES):
        if run_case(name, capsys).encode("utf-8") != expected_path(name).read_bytes():
            mismatched.append(name)
    report(8, "validate/act/compare/render golden outputs", not mismatched,
           f"{len(CASES) - len(mismatched)}/{len(CASES)} byte-identical")
    assert not mismatched, mismatched
