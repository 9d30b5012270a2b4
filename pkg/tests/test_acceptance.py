"""Acceptance checks, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line with the measured values and then
asserts.  The lines are also collected in ``REPORT`` and repeated in the
pytest terminal summary.  Run directly (``python3 tests/test_acceptance.py``)
to get only the summary lines.
"""
import io
import json
import math
import random
import contextlib
import time
from fractions import Fraction

import numpy as np
import pytest

from inoculation import generators as gen
from inoculation import optimum as opt
from inoculation.cli import main as cli_main
from inoculation.equilibria import (is_nash, pure_nash_profiles, star_fractional,
                                    star_fractional_profile, uniform_fractional, worst_pure_nash)
from inoculation.experiments import Scenario, fit_power_law, run_scenario
from inoculation.game import (GameConfig, StrategyProfile, conditional_component_sizes,
                              conditional_infection_probabilities, cost_profile, cost_pure,
                              cost_pure_exact)
from inoculation.graph import component_sizes, is_connected

REPORT = []


def report(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num:>2}: {detail}"
    REPORT.append(line)
    print(line)
    return ok


def test_criterion_01_grid_2x6_exactness():
    t0 = time.perf_counter()
    g = gen.grid(2, 6)
    secure = {2, 8}
    sizes = sorted(component_sizes(g, secure))
    exact = cost_pure(g, GameConfig(1, 1), secure).total
    mc = cost_profile(g, GameConfig(1, 1), StrategyProfile.pure(12, secure), mode="monte_carlo",
                      samples=100_000, seed=0)
    elapsed = time.perf_counter() - t0
    target = 2 + 52 / 12
    ok = (sizes == [4, 6] and abs(exact - target) <= 1e-12
          and abs(mc.total - target) <= mc.half_width and elapsed < 1.0)
    report(1, ok, f"exact={exact:.15g} target={target:.15g} mc={mc.total:.6f}+-{mc.half_width:.6f} "
                  f"time={elapsed:.2f}s")
    assert ok


def test_criterion_02_star_poa():
    t0 = time.perf_counter()
    details, ok = [], True
    for n in (8, 12, 16):
        g, cfg = gen.star(n), GameConfig(1, 1)
        _, ne = worst_pure_nash(g, cfg)
        secure, _ = opt.brute_force_optimum(g, cfg)
        opt_exact = cost_pure_exact(g, cfg, secure)
        ratio = Fraction(ne) / opt_exact
        ok &= ne == n and opt_exact == 1 + Fraction(n - 1, n) and ratio >= Fraction(n, 2)
        details.append(f"n={n} ne={ne} opt={opt_exact} poa={float(ratio):.4f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    report(2, ok, "; ".join(details) + f" time={elapsed:.1f}s")
    assert ok


def _random_connected_graph(rng):
    while True:
        n = rng.randint(4, 9)
        g = gen.gnp(n, rng.uniform(0.2, 0.8), rng.randrange(2 ** 32))
        if is_connected(g):
            return g


def test_criterion_03_delta_bound_validity():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    violations, slack = 0, math.inf
    for _ in range(100):
        g = _random_connected_graph(rng)
        C = Fraction(rng.uniform(0.1, 10)).limit_denominator(1000)
        L = Fraction(rng.uniform(0.1, 10)).limit_denominator(1000)
        _, cost = opt.brute_force_optimum(g, GameConfig(C, L))
        delta = max(len(a) for a in g.adjacency)
        bound = opt.delta_opt_lower_bound(g.n, delta, C, L)
        violations += bound > cost + 1e-12
        slack = min(slack, cost - bound)
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 60
    report(3, ok, f"graphs=100 violations={violations} min_slack={slack:.4f} time={elapsed:.1f}s")
    assert ok


def test_criterion_04_sqrt_scaling():
    t0 = time.perf_counter()
    res = run_scenario(Scenario("delta_scaling", ns=(256, 1024, 4096), deltas=(2, 4),
                                reproducible=True))
    elapsed = time.perf_counter() - t0
    fits = {int(k): v for k, v in res.fits.items()}
    ok = set(fits) == {2, 4} and elapsed < 60
    ok &= all(abs(f["exponent"] - 0.5) <= 0.1 and f["r2"] >= 0.99 for f in fits.values())
    desc = " ".join(f"delta={d}: slope={f['exponent']:.4f} r2={f['r2']:.5f}" for d, f in sorted(fits.items()))
    report(4, ok, f"{desc} time={elapsed:.1f}s")
    assert ok


def test_criterion_05_fractional_star():
    t0 = time.perf_counter()
    n, C, L = 10, 1, 2
    p, q = star_fractional(n, C, L)
    g, cfg = gen.star(n), GameConfig(C, L)
    prof = star_fractional_profile(n, C, L)
    s = conditional_component_sizes(g, prof)
    nash = is_nash(g, cfg, prof)
    total = cost_profile(g, cfg, prof).total
    elapsed = time.perf_counter() - t0
    ok = (q == Fraction(5, 41) and p == Fraction(5, 9) and np.max(np.abs(s - 5)) <= 1e-9
          and nash.is_nash and abs(total - C * n) <= 1e-9 and elapsed < 10)
    report(5, ok, f"q={q} p={p} S_root={s[0]:.12f} S_leaf={s[1]:.12f} nash={nash.is_nash} "
                  f"cost={total:.12f} time={elapsed:.2f}s")
    assert ok


def test_criterion_06_transitive_uniform():
    t0 = time.perf_counter()
    g, C, L = gen.cycle(12), Fraction(3, 10), 1
    sol = uniform_fractional(g, C, L)
    prof = StrategyProfile.uniform(12, sol.p)
    s = conditional_component_sizes(g, prof)
    total = cost_profile(g, GameConfig(C, L), prof).total
    elapsed = time.perf_counter() - t0
    ok = (abs(sol.S - 3.6) <= 1e-6 and np.ptp(s) <= 1e-9 and abs(total - 0.3 * L * 12) <= 1e-6
          and elapsed < 30)
    report(6, ok, f"p={sol.p:.10f} S={sol.S:.10f} spread={np.ptp(s):.2e} cost={total:.10f} "
                  f"time={elapsed:.2f}s")
    assert ok


def test_criterion_07_threshold2_star():
    t0 = time.perf_counter()
    n, cfg = 20, GameConfig(1, 1, 2)
    g = gen.star(n)
    # a leaf has one neighbour, so it is infected only as a start node, whatever others do
    rng = random.Random(7)
    profiles = [StrategyProfile.pure(n), StrategyProfile.pure(n, [0])]
    profiles += [StrategyProfile.pure(n, {v for v in range(n) if rng.random() < 0.5}) for _ in range(6)]
    p_leaf = {float(x) for prof in profiles
              for x in np.delete(conditional_infection_probabilities(g, prof, 2), 0)}
    leaf_ok = p_leaf == {2 / n}
    # L * 2/n < C, so securing is strictly dominated for every leaf at n = 20
    dominated = cfg.Lf * 2 / n < cfg.Cf
    bound20 = max(cfg.Lf, cfg.Cf) + 2 * cfg.Lf * (1 - 1 / n)
    # exhaustive enumeration on the reduced instance: root plus 2^10 leaf subsets
    m = 11
    small = gen.star(m)
    _, worst = worst_pure_nash(small, cfg)
    bound11 = max(cfg.Lf, cfg.Cf) + 2 * cfg.Lf * (1 - 1 / m)
    leaves_secure = [s for s in pure_nash_profiles(small, cfg) if any(v != 0 for v in s)]
    elapsed = time.perf_counter() - t0
    ok = (leaf_ok and dominated and abs(bound20 - 2.9) <= 1e-12 and worst <= bound11 + 1e-12
          and worst <= bound20 and not leaves_secure and elapsed < 60)
    report(7, ok, f"p_leaf={sorted(p_leaf)} worst_ne(n=11)={worst:.6f} bound(n=11)={bound11:.6f} "
                  f"bound(n=20)={bound20:.3f} leaf_secure_ne={len(leaves_secure)} time={elapsed:.1f}s")
    assert ok


def test_criterion_08_bistar_linear():
    t0 = time.perf_counter()
    cfg = GameConfig(1, 1, 2)
    bounds, ok, parts = {}, True, []
    for n in (20, 50, 100):
        g = gen.bistar(n)
        zero = StrategyProfile.pure(n)
        nash = is_nash(g, cfg, zero)
        ne_cost = cost_pure(g, cfg, ()).total
        center = cost_pure(g, cfg, {0, 1}).total
        ok &= nash.is_nash and ne_cost == pytest.approx(n, abs=1e-9)
        ok &= center <= 2 + 2 * (n - 2) / n + 1e-12 and center <= 4
        bounds[n] = ne_cost / center
        parts.append(f"n={n} ne={ne_cost:.6g} center={center:.6g} ratio={bounds[n]:.4f}")
    doubling = bounds[100] / bounds[50]
    elapsed = time.perf_counter() - t0
    ok &= abs(doubling - 2) <= 0.2 and elapsed < 10
    report(8, ok, "; ".join(parts) + f" ratio100/50={doubling:.4f} time={elapsed:.2f}s")
    assert ok


def test_criterion_09_tree_bound():
    t0 = time.perf_counter()
    rng = random.Random(99)
    bad, worst = 0, 0.0
    for _ in range(200):
        n = rng.randint(3, 400)
        t = gen.random_tree(n, rng.randrange(2 ** 32))
        removed = opt.tree_separator_strategy(t)
        sizes = component_sizes(t, removed)
        cost = cost_pure(t, GameConfig(1, 1), removed).total
        root = math.sqrt(n)
        bad += not (len(removed) <= 2 * root - 2 and max(sizes, default=0) <= root
                    and cost <= 2 * root + root)
        worst = max(worst, len(removed) / (2 * root - 2))
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 30
    report(9, ok, f"trees=200 violations={bad} max_removed/(2sqrt(n)-2)={worst:.3f} time={elapsed:.1f}s")
    assert ok


def test_criterion_10_random_graph_constant_poa():
    t0 = time.perf_counter()
    ns = (100, 200, 400)
    ratios = {n: [] for n in ns}
    for n in ns:
        for seed in range(20):
            g = gen.gnp(n, 2 / n, seed)
            _, cost = opt.greedy_optimum(g, GameConfig(1, 1))
            ratios[n].append(n / cost)
    means = {n: float(np.mean(r)) for n, r in ratios.items()}
    slope, _ = fit_power_law([(n, means[n]) for n in ns])
    peak = max(max(r) for r in ratios.values())
    elapsed = time.perf_counter() - t0
    ok = peak <= 25 and abs(slope) <= 0.15 and elapsed < 300
    desc = " ".join(f"n={n}:{m:.3f}" for n, m in means.items())
    report(10, ok, f"mean ratio {desc} max={peak:.3f} log-slope={slope:.4f} (limit 0.15) "
                   f"time={elapsed:.1f}s")
    assert ok


CLI_JSON = [
    ["cost", "--family", "grid", "--rows", "2", "--cols", "6", "--secure", "2,8", "--mode", "mc",
     "--samples", "100000", "--seed", "0"],
    ["nash", "worst", "--family", "star", "--n", "12"],
    ["optimum", "--family", "star", "--n", "12"],
    ["nash", "fractional-star", "--n", "10", "--C", "1", "--L", "2"],
    ["nash", "fractional-uniform", "--family", "cycle", "--n", "12", "--C", "0.3"],
    ["poa", "--family", "bistar", "--n", "50", "--threshold", "2", "--opt-method", "given",
     "--opt-secure", "0,1", "--ne-method", "analytic"],
    ["optimum", "--family", "gnp", "--n", "200", "--p", "0.01", "--seed", "3", "--method", "greedy"],
    ["optimum", "--family", "random_tree", "--n", "300", "--seed", "5", "--method", "tree-sep"],
]

SCENARIOS = ["star_poa", "delta_scaling", "tree_bound", "planar_grid", "bistar_threshold2",
             "random_gnp", "fractional_star", "fractional_transitive"]


def _cli_bytes(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(argv)
    return code, buf.getvalue().encode()


def test_criterion_11_determinism(tmp_path):
    t0 = time.perf_counter()
    mismatched = []
    for name in SCENARIOS:
        blobs = []
        for k in (0, 1):
            out = tmp_path / f"{name}.{k}.csv"
            code, _ = _cli_bytes(["experiment", "--scenario", name, "--reproducible",
                                  "--workers", str(1 + 3 * k), "--out", str(out)])
            fit = out.with_suffix(".fit.json")
            blobs.append((code, out.read_bytes(), fit.read_bytes() if fit.exists() else b""))
        if blobs[0] != blobs[1] or blobs[0][0] != 0:
            mismatched.append(name)
    for argv in CLI_JSON:
        a, b = _cli_bytes(argv + ["--reproducible"]), _cli_bytes(argv + ["--reproducible"])
        if a != b or a[0] != 0:
            mismatched.append(" ".join(argv[:2]))
        json.loads(a[1])
    elapsed = time.perf_counter() - t0
    ok = not mismatched
    report(11, ok, f"scenarios={len(SCENARIOS)} cli_outputs={len(CLI_JSON)} mismatched={mismatched} "
                   f"time={elapsed:.1f}s")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
