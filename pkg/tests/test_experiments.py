import csv
import io
import json
import math

import pytest
from hypothesis import given, strategies as st

from inoculation.errors import PreconditionError
from inoculation.experiments import (COLUMNS, Scenario, fit_power_law, fmt, render_svg,
                                     run_scenario)


def _rows(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_fit_power_law_exact():
    slope, r2 = fit_power_law([(10, 10), (100, 100), (1000, 1000)])
    assert slope == pytest.approx(1.0) and r2 == pytest.approx(1.0)


@given(st.lists(st.integers(1, 10 ** 6), min_size=3, max_size=10, unique=True))
def test_fit_sqrt_law(ns):
    slope, r2 = fit_power_law([(n, math.sqrt(n)) for n in ns])
    assert slope == pytest.approx(0.5, abs=1e-9)


def test_fit_preconditions():
    with pytest.raises(PreconditionError):
        fit_power_law([(1, 1), (2, 2)])
    with pytest.raises(PreconditionError):
        fit_power_law([(1, 1), (2, 0), (3, 3)])


def test_fmt_twelve_significant_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(16 / 1.9375) == "8.25806451613"
    assert fmt(3) == "3" and fmt(None) == "" and fmt("x") == "x"


def test_star_scenario_rows():
    res = run_scenario(Scenario("star_poa", reproducible=True))
    rows = _rows(res.csv)
    assert [int(r["n"]) for r in rows] == [8, 12, 16]
    assert list(rows[0].keys()) == list(COLUMNS)
    for r in rows:
        n = int(r["n"])
        assert float(r["poa"]) >= n / 2
        assert float(r["ne_cost"]) == n
        assert float(r["opt_cost"]) == pytest.approx(1 + (n - 1) / n, abs=1e-11)
        # every poa value is recomputable from the two cost columns
        assert float(r["poa"]) == pytest.approx(float(r["ne_cost"]) / float(r["opt_cost"]), rel=1e-11)


def test_header_and_reproducibility(tmp_path):
    a = run_scenario(Scenario("bistar_threshold2", ns=(10, 20), reproducible=True,
                              out=str(tmp_path / "a.csv")))
    run_scenario(Scenario("bistar_threshold2", ns=(10, 20), reproducible=True, workers=2,
                          out=str(tmp_path / "b.csv")))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert a.csv.startswith("# scenario: bistar_threshold2\n# target: ")
    assert "# generated:" not in a.csv
    stamped = run_scenario(Scenario("bistar_threshold2", ns=(10,)))
    assert "# generated:" in stamped.csv


def test_error_rows_do_not_abort(tmp_path):
    res = run_scenario(Scenario("planar_grid", ns=(16, 17, 25), reproducible=True))
    rows = _rows(res.csv)
    assert [r["error"] != "" for r in rows] == [False, True, False]
    assert "PreconditionError" in rows[1]["error"]


def test_delta_scaling_fit_sidecar(tmp_path):
    out = tmp_path / "d.csv"
    res = run_scenario(Scenario("delta_scaling", ns=(256, 1024, 4096), deltas=(3,),
                                reproducible=True, out=str(out), plot=str(tmp_path / "d.svg")))
    fit = json.loads(out.with_suffix(".fit.json").read_text())
    assert set(fit) == {"3"} and 0.4 <= fit["3"]["exponent"] <= 0.6
    assert res.fits["3"]["exponent"] == fit["3"]["exponent"]
    assert "# fit 3: exponent=" in res.csv
    svg = (tmp_path / "d.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<circle") == 3


def test_fractional_scenarios():
    rows = _rows(run_scenario(Scenario("fractional_star", ns=(10,), reproducible=True)).csv)
    assert float(rows[0]["ne_cost"]) == pytest.approx(10.0, abs=1e-9)
    rows = _rows(run_scenario(Scenario("fractional_transitive", ns=(12,), reproducible=True)).csv)
    assert float(rows[0]["ne_cost"]) == pytest.approx(3.6, abs=1e-6)


def test_unknown_scenario():
    with pytest.raises(PreconditionError):
        run_scenario(Scenario("nope"))


def test_svg_handles_empty_rows():
    assert render_svg("x", []).strip().endswith("</svg>")
