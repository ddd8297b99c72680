import csv
import json

import numpy as np
import pytest

from quatmax import cli
from quatmax.grid import GridField, GridSpec
from quatmax.verify import SUITES, VerifyConfig, run_suite


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("suite", ["algebra", "identities", "riccati", "equivalence", "fundamental"])
def test_suites_pass_with_small_samples(suite):
    cfg = VerifyConfig(n_points=100, n_algebra=2000, n_anticommutator=500)
    result = run_suite(suite, cfg)
    assert result.passed, result.first_failure()
    assert all(np.isfinite(c.observed) for c in result.checks)


def test_verify_algebra_counts_table_checks(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "verify", "algebra", "--out", str(out))
    assert code == 0 and "[PASS] algebra" in text
    doc = json.loads(out.read_text())
    names = [c["name"] for c in doc["suites"][0]["checks"]]
    assert sum(n.startswith("table") for n in names) == 16
    assert "associativity" in names
    assert doc["config"]["seed"] == 42
    assert set(doc["meta"]) >= {"started_at", "elapsed_s"}


def test_verify_equivalence_reports_map_error(tmp_path, capsys):
    out = tmp_path / "e.json"
    code, _, _ = run(capsys, "verify", "equivalence", "--profile", "exp:a=1,0,0", "--omega", "1",
                     "--seed", "42", "--out", str(out))
    assert code == 0
    checks = json.loads(out.read_text())["suites"][0]["checks"]
    maps = [c for c in checks if c["name"].startswith("map")]
    assert maps and max(c["observed"] for c in maps) <= 1e-11


def test_verify_fundamental_with_explicit_profile(tmp_path, capsys):
    out = tmp_path / "f.json"
    code, _, _ = run(capsys, "verify", "fundamental", "--profile", "planewave-phi:c=0,0,1", "--c", "1",
                     "--out", str(out))
    assert code == 0
    checks = {c["name"]: c for c in json.loads(out.read_text())["suites"][0]["checks"]}
    assert checks["dirac residual on excluded-ball grid"]["observed"] <= 1e-8


def test_exit_codes(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "bogus"])
    assert info.value.code == 2
    code, text, _ = run(capsys, "verify", "algebra", "--tol", "assoc=1e-30")
    assert code == 1 and "first failure: associativity" in text
    code, _, err = run(capsys, "verify", "equivalence", "--profile", "nope")
    assert code == 2 and "unknown profile" in err
    code, _, _ = run(capsys, "verify", "algebra", "--tol", "nokey=1")
    assert code == 2


def test_report_is_deterministic(tmp_path, capsys):
    docs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        run(capsys, "verify", "riccati", "--seed", "7", "--out", str(path))
        doc = json.loads(path.read_text())
        doc.pop("meta")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_generate_fundamental(tmp_path, capsys):
    out = tmp_path / "fund.csv"
    code, _, _ = run(capsys, "generate", "fundamental", "--c", "1", "--out", str(out))
    assert code == 0
    rows = read_rows(out)
    assert len(rows) == 33**3
    for r in rows:
        inside = float(r["x1"]) ** 2 + float(r["x2"]) ** 2 + float(r["x3"]) ** 2 <= 0.01
        assert r["valid"] == ("0" if inside else "1")
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["grid"]["exclusion"] == {"center": [0.0, 0.0, 0.0], "radius": 0.1}
    assert meta["residual_report"]["residuals"]["dirac"]["linf"] <= 1e-8
    back = GridField.read_csv(out, GridSpec.cube(-2, 2, 33))
    assert back.valid.sum() == meta["residual_report"]["n_valid"]


def test_generate_darboux_origin_row(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, _, _ = run(capsys, "generate", "darboux", "--profile", "planewave-phi:c=0,0,1",
                     "--psi", "planewave:c=1,0,0", "--grid", "o=-1,h=0.5,n=5", "--out", str(out))
    assert code == 0
    origin = [r for r in read_rows(out) if float(r["x1"]) == float(r["x2"]) == float(r["x3"]) == 0][0]
    got = [float(origin[k]) for k in ("q0_re", "q0_im", "q1_re", "q1_im", "q2_re", "q2_im", "q3_re", "q3_im")]
    assert got == pytest.approx([0, 0, 0, 1, 0, 0, 0, -1], abs=1e-15)


def test_generate_planewave_pair(tmp_path, capsys):
    out = tmp_path / "pw.csv"
    code, _, _ = run(capsys, "generate", "planewave", "--grid", "o=-1,h=0.25,n=9", "--out", str(out))
    assert code == 0
    assert (tmp_path / "pw_E.csv").exists() and (tmp_path / "pw_H.csv").exists()
    meta = json.loads((tmp_path / "pw.json").read_text())
    assert max(r["linf"] for r in meta["residual_report"]["residuals"].values()) <= 1e-13


def test_generate_singular_node_without_exclusion(tmp_path, capsys):
    code, _, err = run(capsys, "generate", "fundamental", "--grid", "o=-2,h=0.125,n=33",
                       "--out", str(tmp_path / "x.csv"))
    assert code == 2 and "exclusion" in err


@pytest.mark.parametrize("op, status, code", [("d-sin", "pass", 0), ("d-linear", "exact", 0), ("darboux", "pass", 0)])
def test_convergence(capsys, tmp_path, op, status, code):
    out = tmp_path / "c.json"
    got, text, _ = run(capsys, "convergence", op, "--h", "0.2", "--levels", "3", "--out", str(out))
    assert got == code and f"status: {status}" in text
    doc = json.loads(out.read_text())
    assert doc["status"] == status and len(doc["h"]) == 3
    if status == "pass":
        assert all(1.8 <= p <= 2.2 for p in doc["orders"])


def test_convergence_bad_h(capsys):
    code, _, _ = run(capsys, "convergence", "d-sin", "--h", "0.3")
    assert code == 2
    code, _, err = run(capsys, "convergence", "d-sin", "--levels", "1")
    assert code == 2 and "levels" in err


def test_every_suite_is_reachable():
    parser = cli.build_parser()
    for name in [*SUITES, "all"]:
        assert parser.parse_args(["verify", name]).suite == name


def test_convergence_inconclusive_exits_1(capsys, monkeypatch):
    def flat(op):
        return lambda s: (np.ones(s.counts), np.ones(s.counts, dtype=bool))

    monkeypatch.setattr(cli, "_convergence_residual", flat)
    code, text, _ = run(capsys, "convergence", "d-sin", "--h", "0.5")
    assert code == 1 and "status: inconclusive" in text
