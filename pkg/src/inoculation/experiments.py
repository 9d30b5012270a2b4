"""Experiment scenarios: parameter sweeps emitted as CSV with optional SVG charts."""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import generators as gen
from .equilibria import EXHAUSTIVE_CAP, star_fractional_profile, uniform_fractional_profile
from .errors import InoculationError, PreconditionError
from .game import GameConfig, cost_profile
from .graph import max_degree
from .optimum import brute_force_optimum, poa

COLUMNS = ("family", "n", "delta", "C", "L", "threshold", "opt_cost", "opt_provenance",
           "ne_cost", "ne_provenance", "poa", "seed", "error")

SCENARIOS = ("star_poa", "delta_scaling", "tree_bound", "planar_grid", "bistar_threshold2",
             "random_gnp", "fractional_star", "fractional_transitive")

TARGETS = {
    "star_poa": "stars reach PoA of at least n/2",
    "delta_scaling": "PoA grows like sqrt(n * delta) on subdivided regular graphs",
    "tree_bound": "separator strategies give PoA of order sqrt(n) on trees",
    "planar_grid": "recursive separators bound the optimum on planar graphs",
    "bistar_threshold2": "threshold-2 PoA grows linearly on the bistar",
    "random_gnp": "PoA stays bounded on sparse random graphs",
    "fractional_star": "fractional star equilibria cost exactly C n",
    "fractional_transitive": "uniform equilibria on transitive graphs cost exactly C n",
}

DEFAULTS = {
    "star_poa": dict(ns=(8, 12, 16)),
    "delta_scaling": dict(ns=(256, 1024, 4096), deltas=(2, 4)),
    "tree_bound": dict(ns=(16, 64, 100, 256, 400), seeds=tuple(range(40))),
    "planar_grid": dict(ns=(16, 36, 64, 144, 256, 400)),
    "bistar_threshold2": dict(ns=(20, 50, 100)),
    "random_gnp": dict(ns=(100, 200, 400), seeds=tuple(range(20))),
    "fractional_star": dict(ns=(6, 10, 16), ratios=((1, 2),)),
    "fractional_transitive": dict(ns=(8, 12, 16), ratios=((Fraction(3, 10), 1),)),
}


@dataclass(frozen=True)
class Scenario:
    """One sweep. Empty grid fields fall back to the scenario defaults."""

    name: str
    ns: tuple = ()
    deltas: tuple = ()
    ratios: tuple = ()  # (C, L) pairs
    seeds: tuple = ()
    out: str | None = None
    plot: str | None = None
    reproducible: bool = False
    workers: int = 1

    def resolved(self) -> "Scenario":
        if self.name not in SCENARIOS:
            raise PreconditionError(f"unknown scenario {self.name!r}; choose from {SCENARIOS}")
        d = DEFAULTS[self.name]
        return replace(
            self,
            ns=tuple(self.ns) or d["ns"],
            deltas=tuple(self.deltas) or d.get("deltas", (0,)),
            ratios=tuple(self.ratios) or d.get("ratios", ((1, 1),)),
            seeds=tuple(self.seeds) or d.get("seeds", (0,)),
        )

    def points(self) -> list:
        s = self.resolved()
        pts = [dict(n=n, delta=d, C=Fraction(C), L=Fraction(L), seed=seed)
               for d in s.deltas for (C, L) in s.ratios for n in s.ns for seed in s.seeds]
        if not pts:
            raise PreconditionError(f"scenario {self.name} has an empty grid")
        return pts


@dataclass
class ScenarioResult:
    name: str
    rows: list
    fits: dict = field(default_factory=dict)
    csv: str = ""


def fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, Fraction, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def fit_power_law(points) -> tuple:
    """Least-squares slope of log(value) on log(n), with r^2."""
    pts = list(points)
    if len(pts) < 3:
        raise PreconditionError(f"need at least 3 points, got {len(pts)}")
    xs = np.array([float(p[0]) for p in pts])
    ys = np.array([float(p[1]) for p in pts])
    if (xs <= 0).any() or (ys <= 0).any():
        raise PreconditionError("power-law fit needs positive coordinates")
    lx, ly = np.log(xs), np.log(ys)
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - float((resid ** 2).sum()) / ss_tot
    return float(slope), r2


# ---------------------------------------------------------------------------
# per-scenario rows


def _row(family, g, cfg, seed, **vals):
    row = dict(family=family, n=g.n, delta=max_degree(g), C=cfg.C, L=cfg.L,
               threshold=cfg.threshold, seed=seed, error="")
    row.update(vals)
    return row


def _poa_row(family, g, cfg, seed, **poa_kw):
    rep = poa(g, cfg, **poa_kw)
    return _row(family, g, cfg, seed, opt_cost=rep.optimum_cost, opt_provenance=rep.opt_provenance,
                ne_cost=rep.worst_ne_cost, ne_provenance=rep.ne_provenance, poa=rep.poa)


def _fractional_row(family, g, cfg, seed, profile):
    ne = cost_profile(g, cfg, profile).total
    if g.n <= EXHAUSTIVE_CAP:
        _, opt = brute_force_optimum(g, cfg)
        prov = "exhaustive"
    else:
        opt, prov = float("nan"), "skipped"
    return _row(family, g, cfg, seed, opt_cost=opt, opt_provenance=prov, ne_cost=ne,
                ne_provenance="fractional_exact", poa=ne / opt)


def _point(name: str, pt: dict) -> dict:
    n, d, seed = pt["n"], pt["delta"], pt["seed"]
    cfg = GameConfig(pt["C"], pt["L"], 2 if name == "bistar_threshold2" else 1)
    if name == "star_poa":
        return _poa_row("star", gen.star(n), cfg, seed)
    if name == "delta_scaling":
        g = gen.subdivided_regular(n, d, seed=seed)
        return _poa_row("subdivided_regular", g, cfg, seed, opt_method="subdivision",
                        ne_method="analytic")
    if name == "tree_bound":
        g = gen.random_tree(n, seed)
        return _poa_row("random_tree", g, cfg, seed, opt_method="tree-sep", ne_method="analytic")
    if name == "planar_grid":
        side = math.isqrt(n)
        if side * side != n:
            raise PreconditionError(f"planar_grid needs square n, got {n}")
        return _poa_row("grid", gen.grid(side, side), cfg, seed, opt_method="recursive-sep",
                        ne_method="analytic")
    if name == "bistar_threshold2":
        return _poa_row("bistar", gen.bistar(n), cfg, seed, opt_method="given",
                        opt_secure=(0, 1), ne_method="analytic")
    if name == "random_gnp":
        g = gen.gnp(n, 2.0 / n, seed)
        return _poa_row("gnp", g, cfg, seed, opt_method="greedy", ne_method="bound")
    if name == "fractional_star":
        g = gen.star(n)
        return _fractional_row("star", g, cfg, seed, star_fractional_profile(n, cfg.C, cfg.L))
    if name == "fractional_transitive":
        g = gen.cycle(n)
        prof = uniform_fractional_profile(g, cfg.C, cfg.L)
        return _fractional_row("cycle", g, cfg, seed, prof)
    raise PreconditionError(f"unknown scenario {name!r}")


def _safe_point(name: str, pt: dict) -> dict:
    try:
        return _point(name, pt)
    except (InoculationError, ValueError, ZeroDivisionError) as exc:
        row = {c: "" for c in COLUMNS}
        row.update(family=name, n=pt["n"], delta=pt["delta"] or "", C=pt["C"], L=pt["L"],
                   seed=pt["seed"], error=f"{type(exc).__name__}: {exc}".replace(",", ";"))
        return row


def _fits(name: str, rows: list) -> dict:
    ok = [r for r in rows if not r["error"] and isinstance(r.get("poa"), float)
          and math.isfinite(r["poa"])]
    groups = {}
    for r in ok:
        key = r["delta"] if name == "delta_scaling" else r["family"]
        groups.setdefault(key, []).append((r["n"], r["poa"]))
    out = {}
    for key, pts in sorted(groups.items()):
        if len({p[0] for p in pts}) < 2 or len(pts) < 3:
            continue
        slope, r2 = fit_power_law(pts)
        out[str(key)] = {"exponent": slope, "r2": r2, "points": len(pts)}
    return out


def render_csv(name: str, rows: list, fits: dict, reproducible: bool) -> str:
    buf = io.StringIO()
    buf.write(f"# scenario: {name}\n")
    buf.write(f"# target: {TARGETS[name]}\n")
    if not reproducible:
        buf.write(f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    buf.write(",".join(COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(fmt(r.get(c, "")) for c in COLUMNS) + "\n")
    for key, f in fits.items():
        buf.write(f"# fit {key}: exponent={fmt(f['exponent'])} r2={fmt(f['r2'])}\n")
    return buf.getvalue()


def run_scenario(s: Scenario) -> ScenarioResult:
    """Evaluate every grid point, in grid order, and optionally write CSV, fit JSON and SVG."""
    pts = s.points()
    if s.workers > 1:
        with ThreadPoolExecutor(max_workers=s.workers) as ex:
            rows = list(ex.map(lambda p: _safe_point(s.name, p), pts))
    else:
        rows = [_safe_point(s.name, p) for p in pts]
    fits = _fits(s.name, rows)
    text = render_csv(s.name, rows, fits, s.reproducible)
    res = ScenarioResult(s.name, rows, fits, text)
    if s.out:
        out = Path(s.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if fits:
            out.with_suffix(".fit.json").write_text(json.dumps(fits, indent=2, sort_keys=True) + "\n")
    if s.plot:
        Path(s.plot).write_text(render_svg(s.name, rows))
    return res


# ---------------------------------------------------------------------------
# SVG


def render_svg(name: str, rows: list, width: int = 480, height: int = 320) -> str:
    """Log-log scatter of PoA against n, one colour per series."""
    pts = [r for r in rows if not r["error"] and isinstance(r.get("poa"), float)
           and r["poa"] > 0 and math.isfinite(r["poa"])]
    pad = 48
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width // 2}" y="18" text-anchor="middle" font-size="13">{name}: PoA vs n (log-log)</text>']
    if pts:
        lx = [math.log(r["n"]) for r in pts]
        ly = [math.log(r["poa"]) for r in pts]
        x0, x1 = min(lx), max(lx) + 1e-9
        y0, y1 = min(ly), max(ly) + 1e-9

        def sx(v):
            return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

        def sy(v):
            return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

        lines.append(f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>')
        lines.append(f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>')
        palette = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
        series = sorted({(r["family"], r["delta"]) for r in pts})
        for k, key in enumerate(series):
            colour = palette[k % len(palette)]
            for r, a, b in zip(pts, lx, ly):
                if (r["family"], r["delta"]) == key:
                    lines.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="{colour}"/>')
            lines.append(f'<text x="{width - pad}" y="{pad + 14 * k}" text-anchor="end" font-size="11" '
                         f'fill="{colour}">{key[0]} delta={key[1]}</text>')
        lines.append(f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" font-size="11">'
                     f'n from {min(r["n"] for r in pts)} to {max(r["n"] for r in pts)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
