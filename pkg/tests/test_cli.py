import json
from pathlib import Path

import pytest

from kmatching.cli import (BUDGET_EXCEEDED, MISMATCH, NONPLANAR, OK, PARSE_FAILURE,
                           PLACEMENT_CONFLICT, main)
from kmatching.formula import FIG1
from kmatching.matcher import Matching
from kmatching.reduction import loads_points

K33 = "p m1in3 3 3\n+ 1 2 3\n+ 1 2 3\n+ 1 2 3\n"


@pytest.fixture
def fig1_file(tmp_path):
    p = tmp_path / "fig1.m1in3"
    p.write_text(FIG1)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_exit_codes_distinct():
    codes = [OK, PARSE_FAILURE, NONPLANAR, PLACEMENT_CONFLICT, MISMATCH, BUDGET_EXCEEDED]
    assert len(set(codes)) == len(codes) and OK == 0


def test_roundtrip_fig1(capsys, fig1_file, tmp_path):
    code, out, _ = run(capsys, "roundtrip", fig1_file, "--k", 3, "--out", tmp_path)
    assert code == OK
    assert out.startswith("satisfiable; matching weight = 2m")


def test_roundtrip_unsat(capsys, tmp_path):
    from conftest import corpus_paths
    path = next(p for p in corpus_paths() if "n4_unsat_a" in p)
    code, out, _ = run(capsys, "roundtrip", path, "--k", 3, "--out", tmp_path)
    assert code == OK and out.startswith("unsatisfiable")


def test_certify_variable3(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", "--gadget", "variable3", "--out", tmp_path)
    assert code == OK
    report = (tmp_path / "variable3.mst.cert").read_text()
    lines = report.splitlines()
    i = lines.index("feasible states: 2")
    assert [ln.split("(")[0].strip() for ln in lines[i + 1:i + 3]] == ["0 0 0", "1 1 1"]


def test_parse_failure(capsys, tmp_path):
    bad = tmp_path / "bad.m1in3"
    bad.write_text("p m1in3 2 1\n+ 1 2 9\n")
    assert run(capsys, "parse", bad, "--out", tmp_path)[0] == PARSE_FAILURE


def test_nonplanar(capsys, tmp_path):
    f = tmp_path / "k33.m1in3"
    f.write_text(K33)
    assert run(capsys, "embed", f, "--out", tmp_path)[0] == NONPLANAR


def test_budget_is_its_own_code(capsys, fig1_file, tmp_path):
    code, _, _ = run(capsys, "roundtrip", fig1_file, "--k", 3, "--budget", "0.000001", "--out", tmp_path)
    assert code == BUDGET_EXCEEDED


def test_pipeline_artifacts(capsys, fig1_file, tmp_path):
    assert run(capsys, "parse", fig1_file, "--out", tmp_path)[0] == OK
    assert run(capsys, "embed", fig1_file, "--out", tmp_path)[0] == OK
    emb = next(tmp_path.glob("*.embedding.json"))
    json.loads(emb.read_text())
    assert run(capsys, "reduce", fig1_file, "--k", 3, "--out", tmp_path)[0] == OK
    pts = next(tmp_path.glob("*.points"))
    text = pts.read_text()
    ps = loads_points(text)
    assert ps.k == 3 and len(ps.points) % 3 == 0
    assert run(capsys, "solve", pts, "--out", tmp_path)[0] == OK
    match = next(tmp_path.glob("*.matching"))
    Matching.loads(match.read_text()).check_partition(len(ps.points), 3)
    code, out, _ = run(capsys, "verify", pts, match)
    assert code == OK and json.loads(out)["verdict"] == "<= W"
    assert run(capsys, "render", pts, "--matching", match, "--out", tmp_path)[0] == OK
    svg = next(tmp_path.glob("*.svg")).read_text()
    assert svg.startswith("<svg") or "<svg" in svg[:200]
    assert "<polyline" in svg or "<path" in svg or "<line" in svg


def test_deterministic_reduce(capsys, fig1_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(capsys, "reduce", fig1_file, "--k", 4, "--out", d)[0] == OK
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_precision_policy_too_small(capsys, fig1_file, tmp_path):
    from kmatching.cli import PRECISION
    code = run(capsys, "reduce", fig1_file, "--k", 7, "--mode", "path",
               "--precision-policy", 2, "--out", tmp_path)[0]
    assert code == PRECISION
