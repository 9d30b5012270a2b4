"""Social optimum: exhaustive search, separator and subdivision heuristics,
greedy inoculation, analytic lower bounds, dismantling probes and PoA reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _batch
from .contagion import _pair_counts
from .equilibria import (EXHAUSTIVE_CAP, class_costs, group_first, mask_to_secure,
                         worst_pure_nash)
from .errors import EnumerationCapError, PreconditionError, SeparatorError
from .game import ENUM_BATCH, GameConfig, _as_exact, cost_pure_exact
from .graph import (Graph, _check_nodes, _require_tree, centroid, component_sizes,
                    connected_components, induced_subgraph, is_connected, max_degree)


def _exceeds_sqrt(size: int, n: int) -> bool:
    """size > sqrt(n), decided in integers."""
    return size * size > n


# ---------------------------------------------------------------------------
# exhaustive optimum


def enumerate_pure_costs(g: Graph, cfg: GameConfig, cap: int = EXHAUSTIVE_CAP,
                         batch: int = ENUM_BATCH):
    """Yield ``(masks, n_secure, infected_total)`` over all 2^n secure sets."""
    n = g.n
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the exhaustive cap {cap}")
    nbr = g.padded_neighbors
    total = 1 << n
    for start in range(0, total, batch):
        count = min(batch, total - start)
        bits = _batch.subset_bits(start, count, n)
        ins = ~bits
        if cfg.threshold == 1:
            _, _, sizes = _batch.component_sizes(nbr, ins)
        else:
            sizes = np.where(ins, _pair_counts(g, ins), 0)
        masks = np.arange(start, start + count, dtype=np.int64)
        yield masks, bits.sum(axis=1), sizes.sum(axis=1)


def brute_force_optimum(g: Graph, cfg: GameConfig, cap: int = EXHAUSTIVE_CAP):
    """Minimum-cost secure set over all 2^n pure profiles.

    Ties: smaller set first, then the sorted secure list that comes first.
    Returns ``(sorted secure list, cost)``.
    """
    classes = {}
    for masks, nsec, inf in enumerate_pure_costs(g, cfg, cap):
        group_first(masks, nsec, inf, g.n, classes, largest=True)
    cost, _, _, mask = min(class_costs(g, cfg, classes), key=lambda r: (r[0], r[1], -r[2]))
    return mask_to_secure(mask, g.n), float(cost)


# ---------------------------------------------------------------------------
# structural heuristics


def tree_separator_strategy(g: Graph) -> list:
    """Centroid removals until every component has at most sqrt(n) nodes.

    Always splits the oversized component with the smallest minimum node.
    Returns removed nodes in removal order.
    """
    _require_tree(g)
    n = g.n
    removed = []
    while True:
        comps = connected_components(g, removed)
        big = next((c for c in comps if _exceeds_sqrt(len(c), n)), None)
        if big is None:
            return removed
        sub = induced_subgraph(g, big)
        removed.append(sub.origin[centroid(sub)])


def tree_centroid_oracle(g: Graph, part) -> set:
    sub = induced_subgraph(g, part)
    return {sub.origin[centroid(sub)]}


def grid_separator_oracle(rows: int, cols: int):
    """Oracle cutting a grid part along the middle line of its longer side.

    Expects parts that are axis-aligned rectangles of a ``rows x cols`` grid
    (node ``r * cols + c``); ties cut a column.
    """

    def oracle(g: Graph, part) -> set:
        coords = [divmod(v, cols) for v in part]
        rs = [r for r, _ in coords]
        cs = [c for _, c in coords]
        h = max(rs) - min(rs) + 1
        w = max(cs) - min(cs) + 1
        if w >= h:
            cut = min(cs) + (w - 1) // 2
            return {v for v, (_, c) in zip(part, coords) if c == cut}
        cut = min(rs) + (h - 1) // 2
        return {v for v, (r, _) in zip(part, coords) if r == cut}

    oracle.rows, oracle.cols = rows, cols
    return oracle


def _check_separator(g: Graph, part: frozenset, sep: set):
    if not sep <= part:
        raise SeparatorError("separator contains nodes outside its part")
    outside = set(range(g.n)) - part
    for piece in connected_components(g, outside | sep):
        if 2 * len(piece) > len(part):
            raise SeparatorError(
                f"separator of size {len(sep)} leaves a piece of {len(piece)} > {len(part)}/2")


def recursive_separator_strategy(g: Graph, separator_oracle, target_components: int) -> list:
    """Apply the oracle for log2(ell) rounds so that all parts end at most n / ell.

    Round j splits every current component larger than n / 2^j. Every
    returned separator is checked to leave pieces of at most half its part.
    """
    ell = int(target_components)
    if ell < 1 or ell & (ell - 1):
        raise PreconditionError(f"target_components must be a power of two, got {ell}")
    k = ell.bit_length() - 1
    n = g.n
    removed = set()
    for j in range(1, k + 1):
        for comp in connected_components(g, removed):
            if len(comp) * (1 << j) <= n:
                continue
            sep = set(separator_oracle(g, sorted(comp)))
            _check_separator(g, comp, sep)
            removed |= sep
    return sorted(removed)


def subdivision_strategy(g: Graph, branch_nodes=None) -> list:
    """Secure the branch nodes of a subdivided regular graph."""
    if branch_nodes is None:
        branch_nodes = g.meta.get("branch_nodes")
    if branch_nodes is None:
        raise PreconditionError("graph carries no branch-node metadata")
    return sorted(_check_nodes(g, branch_nodes))


# ---------------------------------------------------------------------------
# greedy


def _removal_squares(g: Graph, comp, removed: set):
    """For each v in ``comp``: sum of squared piece sizes after deleting v.

    One iterative DFS with low-links; a child subtree separates from v when
    its low-link does not climb above v.
    """
    root = min(comp)
    k = len(comp)
    disc, low, size = {root: 0}, {root: 0}, {root: 1}
    sep_sq = {root: 0}
    sep_sum = {root: 0}
    parent = {root: -1}
    counter = 1
    stack = [(root, iter(g.adjacency[root]))]
    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if w in removed:
                continue
            if w not in disc:
                disc[w] = low[w] = counter
                counter += 1
                size[w] = 1
                sep_sq[w] = sep_sum[w] = 0
                parent[w] = v
                stack.append((w, iter(g.adjacency[w])))
                advanced = True
                break
            if w != parent[v]:
                low[v] = min(low[v], disc[w])
        if advanced:
            continue
        stack.pop()
        p = parent[v]
        if p >= 0:
            size[p] += size[v]
            low[p] = min(low[p], low[v])
            if low[v] >= disc[p]:
                sep_sq[p] += size[v] * size[v]
                sep_sum[p] += size[v]
    out = {}
    for v in comp:
        rest = k - 1 - sep_sum[v]
        out[v] = sep_sq[v] + rest * rest
    return out


def greedy_optimum(g: Graph, cfg: GameConfig):
    """Repeatedly inoculate the node with the largest cost decrease; stop when none decreases.

    Returns ``(secure list in insertion order, cost)``.
    """
    if cfg.threshold == 2:
        return _greedy_generic(g, cfg)
    n = g.n
    C, L = _as_exact(cfg.C), _as_exact(cfg.L)
    removed = set()
    best = {}  # component min node -> (drop in sum k^2, node, component)

    def score(comp):
        sq = _removal_squares(g, comp, removed)
        k2 = len(comp) ** 2
        v = min(comp, key=lambda x: (sq[x], x))
        return k2 - sq[v], v

    for comp in connected_components(g):
        best[min(comp)] = (*score(comp), comp)
    order = []
    while best:
        key = max(best, key=lambda c: (best[c][0], -best[c][1]))
        drop, v, comp = best[key]
        if not L * drop > C * n:
            break
        removed.add(v)
        order.append(v)
        del best[key]
        for piece in _pieces(g, comp, v, removed):
            best[min(piece)] = (*score(piece), piece)
    return order, float(cost_pure_exact(g, cfg, removed))


def _pieces(g: Graph, comp: frozenset, v: int, removed: set) -> list:
    rest = set(comp) - {v}
    out = []
    while rest:
        s = min(rest)
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if w in rest and w not in seen:
                    seen.add(w)
                    stack.append(w)
        rest -= seen
        out.append(frozenset(seen))
    return out


def _greedy_generic(g: Graph, cfg: GameConfig):
    removed = []
    current = cost_pure_exact(g, cfg, removed)
    while True:
        best = None
        for v in range(g.n):
            if v in removed:
                continue
            c = cost_pure_exact(g, cfg, removed + [v])
            if best is None or c < best[0]:
                best = (c, v)
        if best is None or best[0] >= current:
            return removed, float(current)
        current = best[0]
        removed.append(best[1])


# ---------------------------------------------------------------------------
# analytic bounds


def delta_opt_lower_bound(n: int, delta: int, C, L) -> float:
    """Closed form min{C,L} * (2 sqrt(n Δ + 1) - 1) / Δ.

    The exact minimum of :func:`convexity_bound` is one ``min{C,L}/Δ`` lower,
    see :func:`certified_opt_lower_bound`; on stars this closed form exceeds
    the true optimum.
    """
    if delta < 1 or n < 1:
        raise PreconditionError(f"need n >= 1 and delta >= 1, got n={n}, delta={delta}")
    return min(float(C), float(L)) * (2.0 * math.sqrt(n * delta + 1) - 1.0) / delta


def convexity_bound(n: int, delta: int, gamma: float) -> float:
    """gamma + (n - gamma)^2 / (n * gamma * delta): cost / min{C,L} lower bound at gamma inoculations."""
    return gamma + (n - gamma) ** 2 / (n * gamma * delta)


def optimal_gamma(n: int, delta: int) -> float:
    return n / math.sqrt(1 + delta * n)


def certified_opt_lower_bound(n: int, delta: int, C, L) -> float:
    """min{C,L} * (2 sqrt(n Δ + 1) - 2) / Δ: the minimum of the convexity bound."""
    if delta < 1 or n < 1:
        raise PreconditionError(f"need n >= 1 and delta >= 1, got n={n}, delta={delta}")
    return min(float(C), float(L)) * (2.0 * math.sqrt(n * delta + 1) - 2.0) / delta


# ---------------------------------------------------------------------------
# dismantling


@dataclass(frozen=True)
class DismantlingRecord:
    holds: bool
    min_largest_component: int
    removed_count: int
    required_size: float
    probes: tuple  # (probe name, largest component)
    evidence: str = "statistical"


def _largest(g: Graph, removed) -> int:
    return max(component_sizes(g, removed), default=0)


def _bfs_order(g: Graph) -> list:
    order = []
    for comp in connected_components(g):
        s = min(comp)
        seen = {s}
        queue = [s]
        for u in queue:
            for w in g.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        order.extend(queue)
    return order


def _greedy_hub_removal(g: Graph, k: int) -> set:
    removed = set()
    for _ in range(k):
        comps = connected_components(g, removed)
        if not comps:
            break
        big = max(comps, key=lambda c: (len(c), -min(c)))
        v = max(big, key=lambda x: (sum(1 for w in g.adjacency[x] if w not in removed), -x))
        removed.add(v)
    return removed


def dismantling_probe(g: Graph, delta: float = 0.05, eps: float = 0.1, trials: int = 100,
                      seed: int = 0) -> DismantlingRecord:
    """Does every probed ``floor(delta n)``-set leave a component of at least eps*n nodes?

    Probes: ``trials`` uniform random sets plus three adversarial ones
    (highest degree, evenly spaced along a BFS order, greedy hub removal).
    """
    if not (0 < delta < 1 and 0 < eps < 1):
        raise PreconditionError(f"need 0 < delta, eps < 1, got delta={delta}, eps={eps}")
    n = g.n
    k = int(math.floor(delta * n))
    gen = np.random.Generator(np.random.Philox(key=int(seed)))
    probes = []
    for t in range(trials):
        pick = gen.choice(n, size=k, replace=False).tolist() if k else []
        probes.append((f"random_{t}", _largest(g, set(pick))))
    by_degree = sorted(range(n), key=lambda v: (-g.degree(v), v))[:k]
    probes.append(("top_degree", _largest(g, set(by_degree))))
    order = _bfs_order(g)
    spaced = {order[(j * (n + 1)) // (k + 1) - 1] for j in range(1, k + 1)} if k else set()
    probes.append(("evenly_spaced", _largest(g, spaced)))
    probes.append(("greedy_hub", _largest(g, _greedy_hub_removal(g, k))))
    smallest = min(size for _, size in probes)
    return DismantlingRecord(
        holds=all(size >= eps * n for _, size in probes),
        min_largest_component=smallest,
        removed_count=k,
        required_size=eps * n,
        probes=tuple(probes),
    )


# ---------------------------------------------------------------------------
# price of anarchy


@dataclass(frozen=True)
class PoaReport:
    worst_ne_cost: float
    ne_provenance: str  # exhaustive | analytic | analytic_bound
    ne_side: str  # exact | lower | upper: how worst_ne_cost relates to the true worst NE cost
    optimum_cost: float
    opt_provenance: str  # exhaustive | heuristic_upper_bound
    poa: float
    poa_kind: str  # exact | lower_bound | upper_bound | estimate
    analytic_lower_bound_on_opt: float | None
    certified_opt_lower_bound: float | None
    poa_upper_bound: float | None
    opt_secure: tuple = ()
    notes: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "worst_ne_cost": self.worst_ne_cost,
            "ne_provenance": self.ne_provenance,
            "ne_side": self.ne_side,
            "optimum_cost": self.optimum_cost,
            "opt_provenance": self.opt_provenance,
            "poa": self.poa,
            "poa_kind": self.poa_kind,
            "analytic_lower_bound_on_opt": self.analytic_lower_bound_on_opt,
            "certified_opt_lower_bound": self.certified_opt_lower_bound,
            "poa_upper_bound": self.poa_upper_bound,
            "opt_secure": list(self.opt_secure),
            "notes": list(self.notes),
        }


OPT_METHODS = ("brute", "tree-sep", "recursive-sep", "subdivision", "greedy", "given")
NE_METHODS = ("exhaustive", "analytic", "bound")


def _ne_side(g: Graph, cfg: GameConfig, method: str, cap: int):
    n = g.n
    C, L = _as_exact(cfg.C), _as_exact(cfg.L)
    ceiling = min(C, L) * n
    if method == "exhaustive":
        _, cost = worst_pure_nash(g, cfg, cap)
        exact = Fraction(cost) == ceiling or abs(cost - float(ceiling)) <= 1e-9 * float(ceiling)
        return cost, "exhaustive", "exact" if exact else "lower"
    if method == "analytic":
        if C >= L:
            value = cost_pure_exact(g, cfg, ())
        elif C * n <= L:
            value = cost_pure_exact(g, cfg, range(n))
        else:
            raise PreconditionError("analytic worst-NE needs C >= L or C <= L/n")
        return float(value), "analytic", "exact" if value == ceiling else "lower"
    if method == "bound":
        return float(ceiling), "analytic_bound", "upper"
    raise PreconditionError(f"ne_method must be one of {NE_METHODS}, got {method!r}")


def optimum_by_method(g: Graph, cfg: GameConfig, method: str, cap: int, opt_secure=None,
                  separator_oracle=None, target_components=None):
    if method == "brute":
        secure, cost = brute_force_optimum(g, cfg, cap)
        return secure, cost, "exhaustive"
    if method == "tree-sep":
        secure = tree_separator_strategy(g)
    elif method == "recursive-sep":
        if separator_oracle is None:
            separator_oracle = _default_oracle(g)
        if target_components is None:
            candidates = [1 << k for k in range(g.n.bit_length())]
            best = None
            for ell in candidates:
                sec = recursive_separator_strategy(g, separator_oracle, ell)
                c = cost_pure_exact(g, cfg, sec)
                if best is None or c < best[0]:
                    best = (c, sec)
            secure = best[1]
        else:
            secure = recursive_separator_strategy(g, separator_oracle, target_components)
    elif method == "subdivision":
        secure = subdivision_strategy(g)
    elif method == "greedy":
        secure, _ = greedy_optimum(g, cfg)
    elif method == "given":
        if opt_secure is None:
            raise PreconditionError("opt_method 'given' needs opt_secure")
        secure = sorted(_check_nodes(g, opt_secure))
    else:
        raise PreconditionError(f"opt_method must be one of {OPT_METHODS}, got {method!r}")
    return list(secure), float(cost_pure_exact(g, cfg, secure)), "heuristic_upper_bound"


def _default_oracle(g: Graph):
    if "tree" in g.tags or (g.m == g.n - 1 and is_connected(g)):
        return tree_centroid_oracle
    if "rows" in g.meta and "cols" in g.meta:
        return grid_separator_oracle(g.meta["rows"], g.meta["cols"])
    raise PreconditionError("no built-in separator oracle for this graph; pass one explicitly")


def _poa_kind(ne_side: str, opt_prov: str) -> str:
    opt_exact = opt_prov == "exhaustive"
    if ne_side == "exact" and opt_exact:
        return "exact"
    if ne_side in ("exact", "lower"):
        return "lower_bound"
    return "upper_bound" if opt_exact else "estimate"


def poa(g: Graph, cfg: GameConfig, opt_method: str = "brute", ne_method: str = "exhaustive",
        cap: int = EXHAUSTIVE_CAP, opt_secure=None, separator_oracle=None,
        target_components=None) -> PoaReport:
    """Worst-NE cost over optimum cost, labelled by what each side certifies."""
    ne_cost, ne_prov, ne_side = _ne_side(g, cfg, ne_method, cap)
    secure, opt_cost, opt_prov = optimum_by_method(g, cfg, opt_method, cap, opt_secure,
                                               separator_oracle, target_components)
    notes = []
    analytic = certified = upper = None
    if cfg.threshold == 1 and is_connected(g) and g.n > 1:
        d = max_degree(g)
        analytic = delta_opt_lower_bound(g.n, d, cfg.C, cfg.L)
        certified = certified_opt_lower_bound(g.n, d, cfg.C, cfg.L)
        if certified > 0:
            upper = min(float(cfg.C), float(cfg.L)) * g.n / certified
    elif cfg.threshold == 2:
        notes.append("degree-based optimum bound not applicable to threshold 2")
    if ne_prov == "exhaustive":
        notes.append("worst NE searched over pure profiles only")
    if opt_prov != "exhaustive":
        notes.append("optimum is a heuristic upper bound; poa is not exact")
    return PoaReport(
        worst_ne_cost=ne_cost,
        ne_provenance=ne_prov,
        ne_side=ne_side,
        optimum_cost=opt_cost,
        opt_provenance=opt_prov,
        poa=ne_cost / opt_cost,
        poa_kind=_poa_kind(ne_side, opt_prov),
        analytic_lower_bound_on_opt=analytic,
        certified_opt_lower_bound=certified,
        poa_upper_bound=upper,
        opt_secure=tuple(secure),
        notes=tuple(notes),
    )
