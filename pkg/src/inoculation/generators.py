"""Deterministic constructors for the graph families used throughout.

Random families take an explicit 64-bit seed and are reproducible from it.
Node 0 is the root of a star; nodes 0 and 1 are the centres of a bistar.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, PreconditionError
from .graph import Graph

FAMILIES = ("star", "cycle", "complete", "grid", "bistar", "subdivided_regular",
            "gnp", "random_tree", "path")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int | None = None
    rows: int | None = None
    cols: int | None = None
    delta: int | None = None
    p: float | None = None
    seed: int = 0
    m: int | None = None  # branch-node override for subdivided_regular
    params: dict = field(default_factory=dict)


def _need(cond, msg):
    if not cond:
        raise PreconditionError(msg)


def star(n: int) -> Graph:
    """K_{1,n-1} with the root at index 0."""
    _need(n >= 1, f"star needs n >= 1, got {n}")
    return Graph.from_edges(n, [(0, j) for j in range(1, n)], tags={"tree", "planar_hint"})


def path(n: int) -> Graph:
    _need(n >= 1, f"path needs n >= 1, got {n}")
    return Graph.from_edges(n, [(j, j + 1) for j in range(n - 1)], tags={"tree", "planar_hint"})


def cycle(n: int) -> Graph:
    _need(n >= 3, f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(j, (j + 1) % n) for j in range(n)],
                            tags={"vertex_transitive", "planar_hint"})


def complete(n: int) -> Graph:
    _need(n >= 1, f"complete graph needs n >= 1, got {n}")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    tags = {"vertex_transitive"} | ({"planar_hint"} if n <= 4 else set())
    return Graph.from_edges(n, edges, tags=tags)


def grid(rows: int, cols: int) -> Graph:
    """rows x cols lattice; node ``r * cols + c`` sits at (r, c)."""
    _need(rows >= 1 and cols >= 1, f"grid needs positive shape, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    tags = {"planar_hint"} | ({"tree"} if min(rows, cols) == 1 else set())
    return Graph.from_edges(rows * cols, edges, tags=tags,
                            meta={"rows": rows, "cols": cols})


def bistar(n: int) -> Graph:
    """K_{2,n-2} plus the edge between its two centres {0, 1}."""
    _need(n >= 3, f"bistar needs n >= 3, got {n}")
    edges = [(0, 1)] + [(c, j) for j in range(2, n) for c in (0, 1)]
    return Graph.from_edges(n, edges, tags={"planar_hint"})


def gnp(n: int, p: float, seed: int) -> Graph:
    _need(n >= 1, f"gnp needs n >= 1, got {n}")
    _need(0.0 <= p <= 1.0, f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def random_tree(n: int, seed: int) -> Graph:
    """Uniform labelled tree decoded from a seeded Prüfer sequence."""
    _need(n >= 1, f"random_tree needs n >= 1, got {n}")
    if n <= 2:
        return Graph.from_edges(n, [(0, 1)] if n == 2 else [], tags={"tree", "planar_hint"})
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    seq = rng.integers(0, n, size=n - 2).tolist()
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Graph.from_edges(n, edges, tags={"tree", "planar_hint"})


def circulant_regular(m: int, delta: int) -> list:
    """Edges of a connected ``delta``-regular circulant on ``m`` nodes.

    Offsets 1..delta//2, plus the antipodal offset m/2 when delta is odd.
    Exists whenever m > delta and m * delta is even.
    """
    if m <= delta or (m * delta) % 2:
        raise InfeasibleError(f"no {delta}-regular circulant on {m} nodes")
    offsets = list(range(1, delta // 2 + 1))
    edges = set()
    for v in range(m):
        for s in offsets:
            w = (v + s) % m
            edges.add((min(v, w), max(v, w)))
        if delta % 2:
            w = (v + m // 2) % m
            edges.add((min(v, w), max(v, w)))
    return sorted(edges)


def _feasible_m(n: int, delta: int, m: int) -> bool:
    return m >= delta + 1 and (m * delta) % 2 == 0 and n - m >= m * delta // 2


def choose_branch_count(n: int, delta: int) -> int:
    """Feasible branch count nearest to 2*sqrt(n/Δ); ties go to the smaller m.

    Feasible: m > Δ, mΔ even, and at least one internal node per subdivided edge.
    """
    target = 2.0 * math.sqrt(n / delta)
    cands = [m for m in range(delta + 1, n + 1) if _feasible_m(n, delta, m)]
    if not cands:
        raise InfeasibleError(f"no feasible branch count for n={n}, delta={delta}")
    return min(cands, key=lambda m: (abs(m - target), m))


def subdivided_regular(n: int, delta: int, seed: int = 0, m: int | None = None) -> Graph:
    """Δ-regular base graph on ``m`` branch nodes with every edge replaced by a path.

    Branch nodes are ``0..m-1``; internal path nodes follow, base edge by base
    edge in sorted order. ``n - m`` internal nodes are spread over the mΔ/2
    paths with lengths differing by at most one (longer paths first). The
    base graph is a circulant, so ``seed`` is accepted for interface symmetry
    with the random families but does not change the output.
    """
    _need(delta >= 2, f"subdivided_regular needs delta >= 2, got {delta}")
    _need(n >= 4 * delta - 2, f"subdivided_regular needs n >= 4*delta-2 = {4 * delta - 2}, got {n}")
    rule = "nearest"
    if m is None:
        m = choose_branch_count(n, delta)
    else:
        rule = "override"
        if not _feasible_m(n, delta, m):
            raise InfeasibleError(f"branch count m={m} infeasible for n={n}, delta={delta}")
    base = circulant_regular(m, delta)
    n_paths = len(base)
    q, r = divmod(n - m, n_paths)
    lengths = [q + 1 if k < r else q for k in range(n_paths)]
    edges = []
    nxt = m
    for (u, v), length in zip(base, lengths):
        chain = [u] + list(range(nxt, nxt + length)) + [v]
        nxt += length
        edges.extend(zip(chain[:-1], chain[1:]))
    assert nxt == n
    meta = {
        "branch_nodes": list(range(m)),
        "m": m,
        "delta": delta,
        "path_lengths": sorted(set(lengths)),
        "m_rule": rule,
        "m_target": 2.0 * math.sqrt(n / delta),
    }
    tags = {"vertex_transitive"} if delta == 2 and len(set(lengths)) == 1 else set()
    return Graph.from_edges(n, edges, tags=tags, meta=meta)


def generate(spec: FamilySpec) -> Graph:
    f = spec.family
    if f == "star":
        return star(spec.n)
    if f == "path":
        return path(spec.n)
    if f == "cycle":
        return cycle(spec.n)
    if f == "complete":
        return complete(spec.n)
    if f == "grid":
        _need(spec.rows is not None and spec.cols is not None, "grid needs rows and cols")
        return grid(spec.rows, spec.cols)
    if f == "bistar":
        return bistar(spec.n)
    if f == "subdivided_regular":
        _need(spec.delta is not None, "subdivided_regular needs delta")
        return subdivided_regular(spec.n, spec.delta, spec.seed, m=spec.m)
    if f == "gnp":
        _need(spec.p is not None, "gnp needs p")
        return gnp(spec.n, spec.p, spec.seed)
    if f == "random_tree":
        return random_tree(spec.n, spec.seed)
    raise PreconditionError(f"unknown family {f!r}; expected one of {FAMILIES}")
