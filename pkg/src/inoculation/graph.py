"""Immutable undirected simple graphs on dense integer nodes ``0..n-1``."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NotATreeError, PreconditionError

KNOWN_TAGS = frozenset({"vertex_transitive", "tree", "planar_hint"})


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph.

    Build with :meth:`from_edges`; the raw constructor trusts its arguments.
    ``origin`` maps local node indices back to a parent graph's indices for
    graphs produced by :func:`induced_subgraph`. ``meta`` carries generator
    metadata (branch nodes, grid shape, ...) and does not take part in equality.
    """

    n: int
    edges: frozenset
    adjacency: tuple
    tags: frozenset = frozenset()
    meta: Mapping = field(default_factory=lambda: MappingProxyType({}))
    origin: tuple | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], tags=(), meta=None,
                   origin=None) -> "Graph":
        if n < 1:
            raise PreconditionError(f"graph needs n >= 1, got {n}")
        canon = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise PreconditionError(f"self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in canon:
                raise PreconditionError(f"duplicate edge {key}")
            canon.add(key)
        nbrs = [[] for _ in range(n)]
        for u, v in canon:
            nbrs[u].append(v)
            nbrs[v].append(u)
        tags = frozenset(tags)
        unknown = tags - KNOWN_TAGS
        if unknown:
            raise PreconditionError(f"unknown tags {sorted(unknown)}")
        return cls(
            n=n,
            edges=frozenset(canon),
            adjacency=tuple(tuple(sorted(a)) for a in nbrs),
            tags=tags,
            meta=MappingProxyType(dict(meta or {})),
            origin=None if origin is None else tuple(origin),
        )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, tags={sorted(self.tags)})"

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    @cached_property
    def padded_neighbors(self) -> np.ndarray:
        """``n x max(1, Δ)`` neighbor table padded with the sentinel ``n``."""
        width = max(1, max_degree(self))
        table = np.full((self.n, width), self.n, dtype=np.int64)
        for v, nb in enumerate(self.adjacency):
            table[v, : len(nb)] = nb
        return table

    def to_original(self, nodes: Iterable[int]) -> list:
        if self.origin is None:
            return sorted(nodes)
        return sorted(self.origin[v] for v in nodes)


def _check_nodes(g: Graph, nodes: Iterable[int]) -> frozenset:
    out = frozenset(int(v) for v in nodes)
    for v in out:
        if not 0 <= v < g.n:
            raise PreconditionError(f"node {v} out of range for n={g.n}")
    return out


def component_of(g: Graph, start: int, removed=frozenset()) -> set:
    """Nodes reachable from ``start`` in ``g`` minus ``removed`` (empty if start removed)."""
    if start in removed:
        return set()
    seen = {start}
    queue = deque([start])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen and w not in removed:
                seen.add(w)
                queue.append(w)
    return seen


def connected_components(g: Graph, removed=frozenset()) -> list:
    """Components of ``g`` minus ``removed``, ordered by their minimum node.

    ``removed`` is a convenience for attack graphs; removed nodes belong to no
    component.
    """
    removed = frozenset(removed)
    label = [-1] * g.n
    comps = []
    for s in range(g.n):
        if label[s] != -1 or s in removed:
            continue
        comp = component_of(g, s, removed)
        for v in comp:
            label[v] = len(comps)
        comps.append(frozenset(comp))
    return comps


def component_sizes(g: Graph, removed=frozenset()) -> list:
    return [len(c) for c in connected_components(g, removed)]


def induced_subgraph(g: Graph, keep: Iterable[int]) -> Graph:
    """Subgraph on ``keep``, relabelled ``0..k-1`` in increasing original order.

    The returned graph's ``origin`` holds the original indices (composed with
    ``g.origin`` when ``g`` is itself a subgraph).
    """
    keep = sorted(_check_nodes(g, keep))
    if not keep:
        raise PreconditionError("induced subgraph needs at least one node")
    local = {v: i for i, v in enumerate(keep)}
    edges = [(local[u], local[v]) for u, v in g.edges if u in local and v in local]
    origin = keep if g.origin is None else [g.origin[v] for v in keep]
    return Graph.from_edges(len(keep), edges, origin=origin)


def max_degree(g: Graph) -> int:
    return max((len(a) for a in g.adjacency), default=0)


def is_connected(g: Graph) -> bool:
    return len(component_of(g, 0)) == g.n


def is_tree(g: Graph) -> bool:
    return g.m == g.n - 1 and is_connected(g)


def _require_tree(g: Graph):
    if not is_tree(g):
        raise NotATreeError(f"graph with n={g.n}, m={g.m} is not a tree")


def subtree_sizes(g: Graph, root: int = 0):
    """Parent array and subtree sizes for a tree rooted at ``root`` (iterative DFS)."""
    parent = [-1] * g.n
    order = []
    stack = [root]
    seen = [False] * g.n
    seen[root] = True
    while stack:
        u = stack.pop()
        order.append(u)
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                stack.append(w)
    size = [1] * g.n
    for u in reversed(order):
        if parent[u] >= 0:
            size[parent[u]] += size[u]
    return parent, size


def centroid(g: Graph) -> int:
    """Smallest-index node whose removal leaves components of size <= n // 2."""
    _require_tree(g)
    n = g.n
    parent, size = subtree_sizes(g)
    for v in range(n):
        largest = n - size[v]
        for w in g.adjacency[v]:
            if w != parent[v]:
                largest = max(largest, size[w])
        if largest <= n // 2:
            return v
    raise AssertionError("every tree has a centroid")


# ---------------------------------------------------------------------------
# edge-list files


def parse_edge_list(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise PreconditionError("empty edge list")
    head = lines[0].split()
    if len(head) != 2:
        raise PreconditionError(f"header must be 'n m', got {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    body = lines[1:]
    if len(body) != m:
        raise PreconditionError(f"header announces {m} edges, found {len(body)}")
    edges = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise PreconditionError(f"bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph.from_edges(n, edges)


def format_edge_list(g: Graph) -> str:
    rows = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(rows) + "\n"


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g))
