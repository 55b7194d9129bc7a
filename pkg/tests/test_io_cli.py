import json
import math
import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from semitoric import io
from semitoric.cli import main
from semitoric.equivalence import InvariantList
from semitoric.geometry import ConvexPolygon, Point2
from semitoric.taylor import FormalSeries2, annulus_grid, format_samples, synthesize_samples
from semitoric.weighted import Cut, MarkedWeightedPolygon, PonderedWeightedPolygon, WeightedPolygon

from gen import random_marked, random_pondered, random_weighted

GOLDEN = Path(__file__).parent / "golden"
HEX = ConvexPolygon(((0, 0), (3, 0), (4, 1), (4, 4), (1, 4), (0, 3)))


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
    return str(path)


def _weighted_doc(polygon, cuts):
    return {"format_version": "1", "weighted_polygon": {"polygon": polygon, "cuts": cuts}}


# -- serialization ------------------------------------------------------------


@pytest.mark.parametrize("seed", range(30))
def test_round_trip_random_bodies(seed):
    rng = random.Random(seed)
    for body in (random_weighted(rng), random_pondered(rng), random_marked(rng)):
        doc = io.Document(body, {"seed": str(seed)})
        assert io.loads(io.dumps(doc)) == doc


def test_round_trip_big_rationals():
    big = 10**40
    poly = ConvexPolygon(((0, 0), (F(big, 3), 0), (0, F(big + 1, 7))))
    w = WeightedPolygon(poly, (Cut(F(1, big), -1),))
    doc = io.Document(w)
    text = io.dumps(doc)
    assert f'"1/{big}"' in text
    assert io.loads(text) == doc


def test_round_trip_golden_invariant_list():
    doc = io.load(GOLDEN / "complexity2.json")
    assert isinstance(doc.body, InvariantList)
    assert io.loads(io.dumps(doc)) == doc


def test_empty_twisting_becomes_pondered():
    doc = io.Document(
        InvariantList(0, (), WeightedPolygon(HEX, ()), (), PonderedWeightedPolygon(WeightedPolygon(HEX, ()), ()))
    )
    assert io.loads(io.dumps(doc)) == doc


@pytest.mark.parametrize(
    "text,match",
    [
        ("{", "line 1, column 2"),
        ("[]", "JSON object"),
        ('{"format_version": "2", "weighted_polygon": {}}', "format_version"),
        ('{"format_version": "1"}', "exactly one"),
        ('{"format_version": "1", "weighted_polygon": {"polygon": [["0", 0.5]]}}', "rational"),
        ('{"format_version": "1", "weighted_polygon": {"polygon": [["0"]]}}', "two-element"),
        ('{"format_version": "1", "metadata": {"a": 1}, "weighted_polygon": {"polygon": []}}', "metadata"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(io.ParseError, match=match):
        io.loads(text)


def test_k_and_mark_rejected_together():
    doc = _weighted_doc([["0", "0"], ["2", "0"], ["0", "2"]], [{"lambda": "1", "epsilon": 1, "k": 0, "mark_y": "1/2"}])
    with pytest.raises(io.ParseError, match="both"):
        io.loads(json.dumps(doc))


def test_kind_survives_without_cuts():
    w = WeightedPolygon(HEX, ())
    for body in (PonderedWeightedPolygon(w, ()), MarkedWeightedPolygon(w, ())):
        assert io.loads(io.dumps(io.Document(body))).body == body


def test_kind_must_match_cuts():
    doc = _weighted_doc([["0", "0"], ["2", "0"], ["0", "2"]], [{"lambda": "1", "epsilon": 1, "k": 0}])
    doc["weighted_polygon"]["kind"] = "marked"
    with pytest.raises(io.ParseError, match="does not match"):
        io.loads(json.dumps(doc))
    doc["weighted_polygon"]["kind"] = "fancy"
    with pytest.raises(io.ParseError, match="unknown kind"):
        io.loads(json.dumps(doc))


def test_marks_load_as_points():
    doc = _weighted_doc([["0", "0"], ["2", "0"], ["0", "2"]], [{"lambda": "1", "epsilon": 1, "mark_y": "1/2"}])
    body = io.loads(json.dumps(doc)).body
    assert isinstance(body, MarkedWeightedPolygon)
    assert body.marks == (Point2(1, F(1, 2)),)


# -- validate -----------------------------------------------------------------


def test_validate_ok(capsys):
    assert main(["validate", str(GOLDEN / "cp2_triangle.json")]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_cut_on_left_edge(tmp_path, capsys):
    path = _write(tmp_path, "a.json", _weighted_doc([["0", "0"], ["3", "0"], ["0", "3"]], [{"lambda": "0", "epsilon": 1}]))
    assert main(["validate", path]) == 1
    err = capsys.readouterr().err
    assert "cut-inside" in err and "strictly" in err


def test_validate_mark_on_boundary(tmp_path, capsys):
    doc = _weighted_doc([["0", "0"], ["3", "0"], ["0", "3"]], [{"lambda": "1", "epsilon": 1, "mark_y": "2"}])
    assert main(["validate", _write(tmp_path, "a.json", doc)]) == 1
    assert "mark-interior" in capsys.readouterr().err


def test_validate_parse_error_reports_position(tmp_path, capsys):
    path = _write(tmp_path, "a.json", '{\n  "format_version": "1",\n  oops\n}')
    assert main(["validate", path]) == 2
    assert "line 3, column 3" in capsys.readouterr().err


def test_validate_missing_file(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "nope.json")]) == 2


def test_validate_nonconvex(tmp_path, capsys):
    doc = _weighted_doc([["0", "0"], ["2", "0"], ["1", "1"], ["2", "2"], ["0", "2"]], [])
    assert main(["validate", _write(tmp_path, "a.json", doc)]) == 1


def test_validate_accepts_what_constructors_accept(tmp_path, capsys):
    rng = random.Random(4)
    for n in range(10):
        path = _write(tmp_path, f"w{n}.json", io.dumps(io.Document(random_marked(rng))))
        assert main(["validate", path]) == 0


# -- act ----------------------------------------------------------------------


def _act(argv, capsys):
    assert main(["act", *argv]) == 0
    return io.loads(capsys.readouterr().out)


def test_act_identity_is_canonical_serialization(capsys):
    path = GOLDEN / "weighted2.json"
    doc = _act([str(path)], capsys)
    assert doc == io.load(path)
    assert io.dumps(doc) == path.read_text()


def test_act_shear_adds_to_indices(capsys):
    doc = _act([str(GOLDEN / "square.json"), "--shear", "2"], capsys)
    assert doc.body.indices == (2,)


def test_act_flip(capsys):
    doc = _act([str(GOLDEN / "weighted2.json"), "--flip", "1"], capsys)
    assert doc.body.signs == (-1, -1)
    assert doc.body.delta == ConvexPolygon(((0, 0), (1, 0), (3, 2), (4, 4), (4, 7), (0, 3)))


def test_act_refused_flip(capsys):
    assert main(["act", str(GOLDEN / "hirzebruch_trapezoid.json"), "--flip", "1"]) == 1
    assert "cannot" in capsys.readouterr().err


def test_act_bad_cut_number(capsys):
    assert main(["act", str(GOLDEN / "weighted2.json"), "--flip", "3"]) == 2


# -- compare ------------------------------------------------------------------


def test_compare_self(capsys):
    path = str(GOLDEN / "complexity2.json")
    assert main(["compare", path, path]) == 0
    out = capsys.readouterr().out.splitlines()
    assert [l.split()[:2] for l in out[:5]] == [[f"({r})", "PASS"] for r in ("i", "ii", "iii", "iv", "v")]


def test_compare_reduced(capsys):
    assert main(["compare", str(GOLDEN / "complexity2.json"), str(GOLDEN / "complexity2_reduced.json")]) == 1
    assert capsys.readouterr().out.splitlines()[-1] == "not equal: first failing item (i)"


def test_compare_weighted_pairs(tmp_path, capsys):
    path = str(GOLDEN / "weighted2.json")
    assert main(["act", path, "--flip", "2", "--shear", "-3"]) == 0
    acted = _write(tmp_path, "b.json", capsys.readouterr().out)
    assert main(["compare", path, acted]) == 0
    assert "shear=-3" in capsys.readouterr().out


def test_compare_mixed_kinds(capsys):
    assert main(["compare", str(GOLDEN / "weighted2.json"), str(GOLDEN / "complexity2.json")]) == 2


def test_degree_from_environment(tmp_path, capsys, monkeypatch):
    doc = io.load(GOLDEN / "complexity2.json")
    s = doc.body.taylor[0]
    bumped = FormalSeries2(s.degree, {**s.coefficients, (4, 0): 1e-3})
    other = io.Document(InvariantList(2, (bumped, doc.body.taylor[1]), doc.body.polygon, doc.body.heights, doc.body.twisting))
    b = _write(tmp_path, "b.json", io.dumps(other))
    a = str(GOLDEN / "complexity2.json")
    assert main(["compare", a, b]) == 1
    monkeypatch.setenv("SEMITORIC_TRUNCATION_DEGREE", "3")
    assert main(["compare", a, b]) == 0
    assert main(["compare", a, b, "--degree", "4"]) == 1
    monkeypatch.setenv("SEMITORIC_TRUNCATION_DEGREE", "four")
    assert main(["compare", a, b]) == 2


# -- canonical, render --------------------------------------------------------


def test_canonical_is_orbit_invariant(tmp_path, capsys):
    path = str(GOLDEN / "weighted2.json")
    assert main(["canonical", path]) == 0
    first = capsys.readouterr().out
    assert main(["act", path, "--flip", "1", "--shear", "5"]) == 0
    acted = _write(tmp_path, "b.json", capsys.readouterr().out)
    assert main(["canonical", acted]) == 0
    assert capsys.readouterr().out == first


def test_render_to_file(tmp_path, capsys):
    out = tmp_path / "x.svg"
    assert main(["render", str(GOLDEN / "complexity2.json"), "--out", str(out), "--no-marks"]) == 0
    svg = out.read_text()
    assert svg.startswith("<?xml") and "<circle" not in svg and "k=1" in svg


def test_render_rejects_bad_size(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["render", str(GOLDEN / "cp2_triangle.json"), "--width", "0"])
    assert exc.value.code == 2


# -- recover-taylor -----------------------------------------------------------


def test_recover_taylor_planted(tmp_path, capsys):
    planted = {(1, 0): 0.25, (0, 1): 2.0, (1, 1): -1.0, (0, 3): 0.5}
    samples = synthesize_samples(planted, annulus_grid(0.1, 0.005))
    path = _write(tmp_path, "s.txt", format_samples(samples))
    assert main(["recover-taylor", path, "--degree", "3"]) == 0
    result = json.loads(capsys.readouterr().out)
    series = FormalSeries2.from_json(result["series"])
    assert result["closedness"]["passed"]
    for key in set(planted) | set(series.coefficients):
        assert abs(series[key] - planted.get(key, 0.0)) <= 1e-6


def test_recover_taylor_down_branch(tmp_path, capsys):
    planted = {(1, 0): 1.0, (0, 1): 0.5}
    samples = synthesize_samples(planted, annulus_grid(0.1, 0.01), branch=math.pi)
    path = _write(tmp_path, "s.txt", format_samples(samples))
    assert main(["recover-taylor", path, "--degree", "1", "--branch", "down"]) == 0
    series = FormalSeries2.from_json(json.loads(capsys.readouterr().out)["series"])
    assert series[(0, 1)] == pytest.approx(0.5, abs=1e-8)


def test_recover_taylor_not_closed(tmp_path, capsys):
    pts = annulus_grid(0.1, 0.01)
    lines = []
    for x, y in pts.tolist():
        # sigma = (z2^2, 0) after regularization
        lines.append(f"{x!r} {y!r} {y * y - math.log(math.hypot(x, y))!r} {math.atan2(y, x) % (2 * math.pi)!r}")
    path = _write(tmp_path, "s.txt", "\n".join(lines) + "\n")
    assert main(["recover-taylor", path]) == 1
    assert "closedness" in capsys.readouterr().err


def test_recover_taylor_empty(tmp_path, capsys):
    assert main(["recover-taylor", _write(tmp_path, "s.txt", "")]) == 2
    assert "parse error" in capsys.readouterr().err
