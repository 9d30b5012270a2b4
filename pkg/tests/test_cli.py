import json
import subprocess
import sys

import pytest

from inoculation.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_writes_edge_list_and_sidecar(tmp_path, capsys):
    path = tmp_path / "g.txt"
    code, _, _ = run(["generate", "--family", "subdivided_regular", "--n", "24", "--delta", "3",
                      "--out", str(path)], capsys)
    assert code == 0
    assert path.read_text().splitlines()[0] == "24 27"
    meta = json.loads(path.with_suffix(".meta.json").read_text())
    assert meta["branch_nodes"] == list(range(6)) and meta["tags"] == []


def test_cost_from_file(tmp_path, capsys):
    path = tmp_path / "grid2x6.txt"
    run(["generate", "--family", "grid", "--rows", "2", "--cols", "6", "--out", str(path)], capsys)
    code, out, _ = run(["cost", "--graph", str(path), "--secure", "2,8"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["total"] == pytest.approx(2 + 52 / 12, abs=1e-12)
    assert set(rep) >= {"total", "per_node", "mode", "samples", "seed", "half_width"}
    code, out, _ = run(["cost", "--graph", str(path), "--secure", "2,8", "--mode", "mc",
                        "--samples", "20000", "--seed", "1"], capsys)
    rep = json.loads(out)
    assert rep["mode"] == "monte_carlo" and rep["samples"] == 20000


def test_cost_with_profile_file(tmp_path, capsys):
    prof = tmp_path / "p.json"
    prof.write_text(json.dumps([5 / 41] + [5 / 9] * 9))
    code, out, _ = run(["cost", "--family", "star", "--n", "10", "--C", "1", "--L", "2",
                        "--profile", str(prof)], capsys)
    assert code == 0 and json.loads(out)["total"] == pytest.approx(10.0, abs=1e-9)


def test_spread(capsys):
    code, out, _ = run(["spread", "--family", "path", "--n", "4", "--threshold", "2",
                        "--starts", "0,2"], capsys)
    assert json.loads(out)["infected"] == [0, 1, 2]


def test_nash_verbs(capsys):
    code, out, _ = run(["nash", "fractional-star", "--n", "10", "--C", "1", "--L", "2"], capsys)
    d = json.loads(out)
    assert d["leaf_p_exact"] == "5/9" and d["root_q_exact"] == "5/41"
    code, out, _ = run(["nash", "worst", "--family", "star", "--n", "8"], capsys)
    assert json.loads(out)["cost"] == 8
    code, out, _ = run(["nash", "dynamics", "--family", "star", "--n", "5", "--secure", "0,1,2,3,4"], capsys)
    assert json.loads(out)["secure"] == [4]
    code, out, _ = run(["nash", "fractional-uniform", "--family", "cycle", "--n", "12", "--C", "0.3"], capsys)
    assert abs(json.loads(out)["S"] - 3.6) <= 1e-6
    code, out, _ = run(["nash", "check", "--family", "star", "--n", "8", "--secure", "0"], capsys)
    assert code == 0 and json.loads(out)["is_nash"]


def test_inconclusive_exit_code(tmp_path, capsys):
    prof = tmp_path / "p.json"
    prof.write_text(json.dumps([5 / 41] + [5 / 9] * 9))
    code, out, _ = run(["nash", "check", "--family", "star", "--n", "10", "--C", "1", "--L", "2",
                        "--profile", str(prof), "--mode", "mc", "--samples", "2000"], capsys)
    assert code == 3 and json.loads(out)["verdict"] == "inconclusive"


def test_optimum_and_poa(capsys):
    code, out, _ = run(["optimum", "--family", "star", "--n", "16"], capsys)
    d = json.loads(out)
    assert d["secure"] == [0] and d["cost"] == pytest.approx(1.9375)
    code, out, _ = run(["optimum", "--family", "grid", "--rows", "7", "--cols", "7",
                        "--method", "recursive-sep", "--ell", "4"], capsys)
    assert len(json.loads(out)["secure"]) == 13
    code, out, _ = run(["poa", "--family", "complete", "--n", "8"], capsys)
    d = json.loads(out)
    assert d["poa"] == pytest.approx(4 / 3) and d["poa_kind"] == "exact"


def test_exit_codes(capsys):
    assert run(["cost", "--family", "star", "--n", "4", "--C", "-1"], capsys)[0] == 2
    assert run(["cost", "--family", "star", "--n", "4", "--secure", "9"], capsys)[0] == 2
    assert run(["optimum", "--family", "path", "--n", "30"], capsys)[0] == 2  # above the cap
    assert run(["cost"], capsys)[0] == 2
    assert run(["cost", "--graph", "/nonexistent/file"], capsys)[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["cost", "--no-such-flag"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["cost", "--C", "abc"])
    assert exc.value.code == 1


def test_experiment_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run(["experiment", "--scenario", "star_poa", "--ns", "8,12", "--reproducible",
                    "--out", str(p)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(["experiment", "--scenario", "random_gnp", "--ns", "100", "--seeds", "0-2",
                        "--reproducible"], capsys)
    assert len([ln for ln in out.splitlines() if ln.startswith("gnp,")]) == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "inoculation", "nash", "fractional-star", "--n", "6",
                           "--C", "1", "--L", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["root_q_exact"] == "3/13"
