import json
import math

import pytest

from qchain import cli
from qchain.cli import fmt, main, parse_n_list, read_csv_rows
from qchain.errors import NumericalFailure, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt():
    assert fmt(0.0) == "0" and fmt(-0.0) == "0"
    assert fmt(3) == "3"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(0.5) == "0.5"
    assert fmt(1e-20) == "1e-20"


def test_parse_n_list():
    assert parse_n_list("3..6") == [3, 4, 5, 6]
    assert parse_n_list("3-5,9") == [3, 4, 5, 9]
    assert parse_n_list("4, 6") == [4, 6]
    with pytest.raises(UsageError):
        parse_n_list(",")


def test_curve_rows_and_header(capsys):
    code, out, _ = run(capsys, "curve", "--n", "3", "--boundary", "open", "--topology", "local",
                       "--xi", "1", "--gamma", "4", "--t-max", "3", "--grid", "300")
    assert code == 0 and out.endswith("\n")
    lines = out.splitlines()
    assert lines[0] == "t,F_opt,rho,sigma_re,sigma_im"
    assert len(lines) == 301
    assert lines[1] == "0,0.5,0,0,0"
    rows = read_csv_rows(out)
    assert all(0.5 <= r["F_opt"] <= 1 for r in rows)


def test_unitary_curve_peaks_at_one(capsys):
    code, out, _ = run(capsys, "curve", "--n", "3", "--topology", "local", "--gamma", "0",
                       "--t-max", str(math.pi / math.sqrt(2)), "--grid", "2")
    assert code == 0
    assert read_csv_rows(out)[-1]["F_opt"] == 1.0


def test_csv_round_trip(capsys):
    code, out, _ = run(capsys, "curve", "--n", "4", "--boundary", "closed", "--gamma", "0.5", "--grid", "50")
    assert code == 0
    rows = read_csv_rows(out)
    for line, row in zip(out.splitlines()[1:], rows):
        assert ",".join(fmt(row[k]) for k in cli.CURVE_HEADER) == line


def test_sweep_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p, workers in zip(paths, ("1", "3")):
        assert main(["sweep", "--n-list", "3..5", "--boundary", "closed", "--gamma", "4",
                     "--grid", "400", "--workers", workers, "--output", str(p)]) == 0
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    rows = read_csv_rows(a.decode())
    assert a.decode().splitlines()[0] == "n,boundary,topology,xi,gamma,t_star,f_max"
    assert [(r["n"], r["topology"]) for r in rows] == [(n, t) for n in (3, 4, 5) for t in ("chained", "local")]


def test_sweep_meta_sidecar(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--n-list", "3", "--grid", "200", "--output", str(out), "--meta"]) == 0
    meta = json.loads((tmp_path / "s.csv.meta.json").read_text())
    assert meta["argv"][0] == "sweep"
    assert "created" not in out.read_text()


def test_json_format(capsys):
    code, out, _ = run(capsys, "sweep", "--n-list", "3", "--topology", "local", "--grid", "200", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"][-1] == "f_max" and len(doc["rows"]) == 1
    assert "meta" not in doc


def test_analytic_first_row_and_agreement(capsys):
    code, out, _ = run(capsys, "analytic", "--boundary", "open", "--topology", "local", "--grid", "100")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t,rho,sigma_re,sigma_im,f_closed_form,f_pipeline"
    assert lines[1] == "0,0,0,0,0.5,0.5"
    for r in read_csv_rows(out):
        assert abs(r["f_closed_form"] - r["f_pipeline"]) <= 1e-9


def test_analytic_rejects_other_lengths(capsys):
    code, _, err = run(capsys, "analytic", "--n", "4")
    assert code == 1 and "n = 3" in err


def test_generator_json(capsys):
    code, out, _ = run(capsys, "generator", "--n", "3", "--boundary", "closed", "--xi", "1", "--gamma", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["h"] == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert doc["M"] == [[2, 1, 1], [1, 2, 1], [1, 1, 2]]
    assert doc["G"]["re"][0][0] == -2 and doc["G"]["im"][0][1] == -1


def test_validate_quick(tmp_path):
    path = tmp_path / "report.json"
    assert main(["validate", "--max-n", "3", "--output", str(path)]) == 0
    rep = json.loads(path.read_text())
    assert rep["passed"] is True
    statuses = {c["status"] for c in rep["checks"]}
    assert "erratum-candidate" in statuses and "fail" not in statuses


def test_validate_failing_gate_exits_two(tmp_path):
    assert main(["validate", "--max-n", "3", "--oracle-tol", "1e-30", "--output", str(tmp_path / "r.json")]) == 2


def test_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 3, "topology": "local", "gamma": 0, "grid": 5, "t_max": 1}))
    code, out, _ = run(capsys, "curve", "--config", str(cfg), "--grid", "7")
    assert code == 0 and len(out.splitlines()) == 8
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "curve", "--config", str(cfg))[0] == 1


@pytest.mark.parametrize("argv", [
    ["curve", "--n", "1"],
    ["curve", "--gamma", "-1"],
    ["curve", "--grid", "1"],
    ["curve", "--boundary", "ring"],
    ["validate", "--max-n", "7"],
    ["curve", "--config", "/nonexistent.json"],
    ["frobnicate"],
])
def test_usage_errors_exit_one(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_numerical_failure_exits_two(monkeypatch, capsys):
    class Broken:
        def __init__(self, spec):
            raise NumericalFailure("diverged", {"status": -1})

    monkeypatch.setattr(cli, "OutputTrace", Broken)
    code, _, err = run(capsys, "curve")
    assert code == 2 and "diverged" in err and '"status": -1' in err
