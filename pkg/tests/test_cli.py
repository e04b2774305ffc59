import io
import json

import pytest

from rumortree import reports
from rumortree.cli import run
from rumortree.laws import GRAMMAR
from rumortree.output import dumps_csv, dumps_json, read_csv, sig


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_critical_binomial():
    code, out, _ = _run("critical", "--family", "binomial", "--n", "3", "--tol", "1e-5")
    assert code == 0
    rec = json.loads(out)
    assert rec["lower"] <= 0.78753 + 1e-5 and rec["upper"] >= 0.78753 - 1e-5
    assert rec["upper"] - rec["lower"] <= 1e-5


def test_survival_theta():
    code, out, _ = _run("survival", "--dist", "binomial:3,1", "--tol", "1e-12")
    rec = json.loads(out)
    assert code == 0 and abs(rec["theta"] - 0.4180111) < 1e-6
    assert set(rec) >= {"psi", "theta", "meanLower", "meanUpper", "iterations", "residual"}


def test_survival_cayley():
    code, out, _ = _run("survival", "--dist", "fixed:3", "--cayley")
    assert code == 0 and json.loads(out)["convention"] == "cayley"
    code, _, err = _run("survival", "--dist", "poisson:3", "--cayley")
    assert code == 2 and "fixed" in err


def test_range_csv(tmp_path):
    code, _, _ = _run("range", "--dist", "binomial:3,0.5", "--max-m", "64", "--out", str(tmp_path))
    assert code == 0
    header, rows = read_csv(tmp_path / "range-binomial_3_0.5.csv")
    assert header == ["m", "lower", "exact", "upper"] and len(rows) == 65
    summary = json.loads((tmp_path / "range-binomial_3_0.5.json").read_text())
    assert round(summary["eLower"], 3) == 1.405 and round(summary["eUpper"], 3) == 1.471
    for m, lo, ex, hi in rows:
        assert float(lo) <= float(ex) <= float(hi)


def test_law_table(tmp_path):
    code, _, _ = _run("law", "--dist", "fixed:2", "--out", str(tmp_path))
    assert code == 0
    header, rows = read_csv(tmp_path / "law-fixed_2.csv")
    assert header == ["i", "probability"]
    assert [float(r[1]) for r in rows] == [sig(1 / 3), sig(4 / 9), sig(2 / 9)]


@pytest.mark.parametrize("argv", [
    ("law", "--dist", "zipf:2"),
    ("range", "--dist", "binomial:3"),
    ("survival", "--dist", "poisson:-2"),
])
def test_bad_spec_exit_2_names_grammar(argv):
    code, _, err = _run(*argv)
    assert code == 2
    assert GRAMMAR in err or "poisson:lambda" in err


def test_argparse_usage_errors_exit_2(capsys):
    assert _run("nosuch")[0] == 2
    assert _run("survival", "--dist", "fixed:3", "--tol", "-1")[0] == 2
    assert _run("simulate", "--dist", "fixed:3", "--depth", "5", "--survival-depth", "9")[0] == 2


def test_numerical_failures_exit_3():
    code, _, err = _run("range", "--dist", "binomial:3,0.9")
    assert code == 3 and "mu" in err
    code, _, err = _run("range", "--dist", "geometric:0.5")
    assert code == 3 and "fails" in err
    code, _, err = _run("critical", "--family", "poisson", "--range", "3", "4")
    assert code == 3 and "straddle" in err


def test_analytic_output_is_byte_stable():
    a = _run("range", "--dist", "poisson:1.5", "--max-m", "16")[1]
    b = _run("range", "--dist", "poisson:1.5", "--max-m", "16")[1]
    assert a == b


def test_simulate_json_independent_of_workers(tmp_path):
    base = ("simulate", "--dist", "poisson:2.6", "--replicas", "3000", "--depth", "12", "--seed", "5")
    one = _run(*base)[1]
    three = _run(*base, "--workers", "3")[1]
    assert one == three
    rec = json.loads(one)
    assert rec["replicas"] == 3000 and rec["engine"] == "generation"
    assert _run(*base, "--out", str(tmp_path))[0] == 0
    assert (tmp_path / "simulate-poisson_2.6.csv").read_text().startswith("m,tail\n")


@pytest.mark.parametrize("which", ["fig2", "fig5", "table1"])
def test_report_round_trip(tmp_path, which):
    code, _, _ = _run("report", which, "--out", str(tmp_path))
    assert code == 0
    header, rows = read_csv(tmp_path / f"report-{which}.csv")
    summary = json.loads((tmp_path / f"report-{which}.json").read_text())
    recomputed = reports.SUMMARIES[which](reports.parse_rows(which, rows))
    assert dumps_json(recomputed) == (tmp_path / f"report-{which}.json").read_text()
    assert summary == json.loads(dumps_json(recomputed))


def test_survival_curve_grid():
    rep = reports.fig2()
    assert len(rep.rows) == 201
    assert rep.rows[0][0] == 0.0 and rep.rows[-1][0] == 1.0
    assert rep.rows[1][0] == 0.005
    assert rep.summary()["maxAbsDiff"] < 1e-8
    assert rep.summary()["firstPositiveP"] == 0.79


def test_range_grid():
    rep = reports.fig5()
    assert [r[0] for r in rep.rows] == list(reports.RANGE_GRID)
    assert rep.summary()["exactInside"]


def test_output_formatting():
    assert sig(1 / 3) == 0.333333333333
    assert sig(float("inf")) is None
    assert dumps_csv(("a", "b"), [(1, 0.1 + 0.2), (2, True)]) == "a,b\n1,0.3\n2,true\n"
    assert dumps_json({"x": 2 / 3}) == '{\n  "x": 0.666666666667\n}\n'
