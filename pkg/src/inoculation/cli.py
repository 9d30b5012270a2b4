"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 precondition violation,
3 inconclusive Monte Carlo certification.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import equilibria as eq
from . import generators as gen
from . import optimum as opt
from .contagion import spread
from .errors import InoculationError, PreconditionError
from .experiments import SCENARIOS, Scenario, run_scenario
from .game import GameConfig, StrategyProfile, cost_profile, profile_from_json
from .graph import Graph, format_edge_list, read_edge_list

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_INCONCLUSIVE = 0, 1, 2, 3

MODES = {"exact": "exact", "mc": "monte_carlo"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _decimal(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}")


def _int_list(text: str) -> tuple:
    """``"1,2,5"`` or ``"0-19"`` (inclusive ranges allowed inside the list)."""
    out = []
    for part in filter(None, text.split(",")):
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _ratio_list(text: str) -> tuple:
    pairs = []
    for part in filter(None, text.split(",")):
        c, _, l = part.partition(":")
        pairs.append((Fraction(c), Fraction(l or "1")))
    return tuple(pairs)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--graph", help="edge-list file (a sibling .meta.json adds tags and metadata)")
    p.add_argument("--family", choices=sorted(gen.FAMILIES), help="generate the graph instead of reading it")
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--m", type=int, help="branch-node count override for subdivided_regular")
    p.add_argument("--C", type=_decimal, default=Fraction(1))
    p.add_argument("--L", type=_decimal, default=Fraction(1))
    p.add_argument("--threshold", type=int, choices=(1, 2), default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=sorted(MODES), default="exact")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--reproducible", action="store_true", help="omit timestamps from outputs")
    return p


def _profile_args(p):
    p.add_argument("--profile", help="JSON array of n inoculation probabilities")
    p.add_argument("--secure", help="comma-separated secure nodes (pure profile)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    root = _Parser(prog="inoculation", description="Inoculation games on graphs.")
    sub = root.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    sub.add_parser("generate", parents=[common], help="write a graph family as an edge list")

    p = sub.add_parser("cost", parents=[common], help="social cost of a profile")
    _profile_args(p)

    p = sub.add_parser("spread", parents=[common], help="run one infection")
    p.add_argument("--secure", default="")
    p.add_argument("--starts", required=True, help="comma-separated start nodes")

    p = sub.add_parser("nash", help="equilibrium tools")
    nsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = nsub.add_parser("check", parents=[common])
    _profile_args(q)
    q.add_argument("--tol", type=float, default=1e-9)
    q = nsub.add_parser("dynamics", parents=[common])
    _profile_args(q)
    q.add_argument("--order", choices=("round_robin", "random"), default="round_robin")
    q.add_argument("--max-rounds", type=int)
    nsub.add_parser("worst", parents=[common])
    nsub.add_parser("fractional-star", parents=[common])
    q = nsub.add_parser("fractional-uniform", parents=[common])
    q.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("optimum", parents=[common], help="social optimum or a heuristic upper bound")
    p.add_argument("--method", choices=("brute", "tree-sep", "recursive-sep", "subdivision", "greedy"),
                   default="brute")
    p.add_argument("--ell", type=int, help="target part count for recursive-sep (power of two)")

    p = sub.add_parser("poa", parents=[common], help="price-of-anarchy report")
    p.add_argument("--opt-method", choices=opt.OPT_METHODS, default="brute")
    p.add_argument("--ne-method", choices=opt.NE_METHODS, default="exhaustive")
    p.add_argument("--opt-secure", help="comma-separated secure set for --opt-method given")
    p.add_argument("--ell", type=int)

    p = sub.add_parser("experiment", parents=[common], help="run a scenario sweep to CSV")
    p.add_argument("--scenario", choices=SCENARIOS, required=True)
    p.add_argument("--ns", type=_int_list, default=())
    p.add_argument("--deltas", type=_int_list, default=())
    p.add_argument("--ratios", type=_ratio_list, default=(), help="C:L pairs, e.g. 1:1,0.3:1")
    p.add_argument("--seeds", type=_int_list, default=())
    p.add_argument("--plot", help="also write an SVG chart")
    return root


# ---------------------------------------------------------------------------
# helpers


def _graph(args) -> Graph:
    if args.graph and args.family:
        raise PreconditionError("give either --graph or --family, not both")
    if args.family:
        if args.n is None and args.family != "grid":
            raise PreconditionError("--family needs --n")
        return gen.generate(gen.FamilySpec(args.family, n=args.n, rows=args.rows, cols=args.cols,
                                           delta=args.delta, p=args.p, seed=args.seed, m=args.m))
    if not args.graph:
        raise PreconditionError("no graph: pass --graph or --family")
    g = read_edge_list(args.graph)
    meta_path = Path(args.graph).with_suffix(".meta.json")
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
        extra = {k: v for k, v in meta.items() if k != "tags"}
        g = Graph.from_edges(g.n, g.edges, tags=meta.get("tags", ()), meta=extra)
    return g


def _cfg(args) -> GameConfig:
    return GameConfig(args.C, args.L, args.threshold)


def _nodes(text) -> list:
    return [int(x) for x in text.split(",") if x.strip()] if text else []


def _profile(args, g: Graph, default_secure=()) -> StrategyProfile:
    if getattr(args, "profile", None) and getattr(args, "secure", None):
        raise PreconditionError("give either --profile or --secure")
    if getattr(args, "profile", None):
        prof = profile_from_json(json.loads(Path(args.profile).read_text()))
        if prof.n != g.n:
            raise PreconditionError(f"profile has {prof.n} entries for a graph on {g.n} nodes")
        return prof
    secure = _nodes(getattr(args, "secure", None)) if getattr(args, "secure", None) else default_secure
    return StrategyProfile.pure(g.n, secure)


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _plain(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


# ---------------------------------------------------------------------------
# verbs


def cmd_generate(args) -> int:
    g = _graph(args)
    text = format_edge_list(g)
    if args.out:
        Path(args.out).write_text(text)
        meta = {"tags": sorted(g.tags), **_plain(dict(g.meta))}
        Path(args.out).with_suffix(".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_cost(args) -> int:
    g = _graph(args)
    rep = cost_profile(g, _cfg(args), _profile(args, g), mode=MODES[args.mode],
                       samples=args.samples, seed=args.seed, workers=args.workers)
    _emit(args, _plain(rep.to_dict()))
    return EXIT_OK


def cmd_spread(args) -> int:
    g = _graph(args)
    out = spread(g, _nodes(args.secure), _nodes(args.starts), args.threshold)
    _emit(args, {"starts": sorted(out.starts), "infected": sorted(out.infected),
                 "secure": sorted(out.secure), "size": len(out.infected)})
    return EXIT_OK


def cmd_nash(args) -> int:
    cfg = _cfg(args)
    if args.action == "fractional-star":
        if args.n is None:
            raise PreconditionError("fractional-star needs --n")
        p, q = eq.star_fractional(args.n, args.C, args.L)
        _emit(args, {"n": args.n, "leaf_p": float(p), "root_q": float(q),
                     "leaf_p_exact": str(p), "root_q_exact": str(q)})
        return EXIT_OK
    g = _graph(args)
    if args.action == "check":
        rep = eq.is_nash(g, cfg, _profile(args, g), tol=args.tol, mode=MODES[args.mode],
                         samples=args.samples, seed=args.seed, workers=args.workers)
        _emit(args, _plain(rep.to_dict()))
        return EXIT_INCONCLUSIVE if rep.verdict == "inconclusive" else EXIT_OK
    if args.action == "dynamics":
        res = eq.best_response_dynamics(g, cfg, _profile(args, g), order=args.order,
                                        seed=args.seed, max_rounds=args.max_rounds)
        _emit(args, {"profile": res.profile.tolist(), "secure": sorted(res.profile.secure),
                     "rounds": res.rounds, "switches": res.switches})
        return EXIT_OK
    if args.action == "worst":
        prof, cost = eq.worst_pure_nash(g, cfg)
        _emit(args, {"profile": prof.tolist(), "secure": sorted(prof.secure), "cost": cost,
                     "provenance": "exhaustive"})
        return EXIT_OK
    if args.action == "fractional-uniform":
        sol = eq.uniform_fractional(g, args.C, args.L, tol=args.tol, mode=MODES[args.mode],
                                    samples=args.samples, seed=args.seed)
        _emit(args, {"p": sol.p, "S": sol.S, "t": sol.t, "iterations": sol.iterations,
                     "method": sol.method})
        return EXIT_OK
    raise PreconditionError(f"unknown nash action {args.action!r}")


def cmd_optimum(args) -> int:
    g, cfg = _graph(args), _cfg(args)
    if args.method == "brute":
        secure, cost = opt.brute_force_optimum(g, cfg)
        prov = "exhaustive"
    else:
        secure, cost, prov = opt.optimum_by_method(g, cfg, args.method, opt.EXHAUSTIVE_CAP,
                                                   target_components=args.ell)
    _emit(args, {"secure": list(secure), "cost": cost, "provenance": prov, "method": args.method})
    return EXIT_OK


def cmd_poa(args) -> int:
    g = _graph(args)
    rep = opt.poa(g, _cfg(args), opt_method=args.opt_method, ne_method=args.ne_method,
                  opt_secure=_nodes(args.opt_secure) if args.opt_secure else None,
                  target_components=args.ell)
    _emit(args, rep.to_dict())
    return EXIT_OK


def cmd_experiment(args) -> int:
    s = Scenario(args.scenario, ns=args.ns, deltas=args.deltas, ratios=args.ratios,
                 seeds=args.seeds, out=args.out, plot=args.plot,
                 reproducible=args.reproducible, workers=args.workers)
    res = run_scenario(s)
    if not args.out:
        sys.stdout.write(res.csv)
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "cost": cmd_cost, "spread": cmd_spread, "nash": cmd_nash,
            "optimum": cmd_optimum, "poa": cmd_poa, "experiment": cmd_experiment}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InoculationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
