"""Infection spread on a fixed secure set, and exact infection probabilities.

Threshold 1: the start floods its component of the attack graph.
Threshold 2: both starts ignite if insecure (degree is irrelevant for a
start); afterwards an insecure node is infected once at least two neighbors
are. Start sets are uniform over nodes (threshold 1) or over all unordered
node pairs (threshold 2), secure nodes included; a secure start is wasted.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import _batch
from .errors import PreconditionError
from .graph import Graph, _check_nodes, component_of


@dataclass(frozen=True)
class InfectionOutcome:
    starts: frozenset
    infected: frozenset
    secure: frozenset


def spread(g: Graph, secure, starts, threshold: int) -> InfectionOutcome:
    secure = _check_nodes(g, secure)
    starts_set = _check_nodes(g, starts)
    if threshold < 1:
        raise PreconditionError(f"threshold must be >= 1, got {threshold}")
    if len(starts_set) != threshold or len(list(starts)) != threshold:
        raise PreconditionError(
            f"threshold {threshold} needs {threshold} distinct start nodes, got {sorted(starts_set)}")
    if threshold == 1:
        (s,) = starts_set
        infected = component_of(g, s, secure)
        return InfectionOutcome(starts_set, frozenset(infected), secure)
    return InfectionOutcome(starts_set, frozenset(_fixpoint(g, secure, starts_set, threshold)), secure)


def _fixpoint(g: Graph, secure: frozenset, starts: frozenset, k: int) -> set:
    infected = {s for s in starts if s not in secure}
    hits = [0] * g.n
    queue = deque(infected)
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w in secure or w in infected:
                continue
            hits[w] += 1
            if hits[w] >= k:
                infected.add(w)
                queue.append(w)
    return infected


def start_sets(n: int, threshold: int):
    if threshold == 1:
        return [(s,) for s in range(n)]
    if threshold == 2:
        return [(u, v) for u in range(n) for v in range(u + 1, n)]
    raise PreconditionError(f"start distribution defined for thresholds 1 and 2 only, got {threshold}")


def infection_counts(g: Graph, secure, threshold: int) -> np.ndarray:
    """For every node, the number of start sets that infect it (secure nodes: 0).

    Threshold 1 counts starts, i.e. the component size; threshold 2 counts
    unordered start pairs out of C(n, 2).
    """
    secure = _check_nodes(g, secure)
    n = g.n
    insecure = np.ones(n, dtype=bool)
    insecure[list(secure)] = False
    if threshold == 1:
        _, _, sizes = _batch.component_sizes(g.padded_neighbors, insecure[None, :])
        return sizes[0].astype(np.int64)
    if threshold != 2:
        raise PreconditionError(f"infection probabilities support thresholds 1 and 2, got {threshold}")
    return _pair_counts(g, insecure[None, :])[0]


def _pair_counts(g: Graph, insecure: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
    """``B x n`` counts of start pairs infecting each node, one row per secure set."""
    n = g.n
    B = insecure.shape[0]
    out = np.zeros((B, n), dtype=np.int64)
    if n < 2:
        return out
    iu, ju = _batch.pair_table(n)
    P = iu.size
    seeds = np.zeros((P, n), dtype=bool)
    seeds[np.arange(P), iu] = True
    seeds[np.arange(P), ju] = True
    rows_per = max(1, chunk // P)
    nbr = g.padded_neighbors
    for b0 in range(0, B, rows_per):
        blk = insecure[b0:b0 + rows_per]
        nb = blk.shape[0]
        ins = np.repeat(blk, P, axis=0)
        sd = np.tile(seeds, (nb, 1))
        inf = _batch.spread_batch(nbr, ins, sd, 2)
        out[b0:b0 + nb] = inf.reshape(nb, P, n).sum(axis=1)
    return out


def infection_probability_exact(g: Graph, secure, i: int, threshold: int) -> Fraction:
    """Probability that insecure node ``i`` is infected, as an exact fraction."""
    secure = _check_nodes(g, secure)
    if i in secure:
        raise PreconditionError(f"node {i} is secure; its infection probability is conditional on being insecure")
    counts = infection_counts(g, secure, threshold)
    total = g.n if threshold == 1 else comb(g.n, 2)
    return Fraction(int(counts[i]), total)


def infection_probability_enumerated(g: Graph, secure, i: int, threshold: int) -> Fraction:
    """Same quantity by running :func:`spread` on every start set (reference path)."""
    secure = _check_nodes(g, secure)
    if i in secure:
        raise PreconditionError(f"node {i} is secure")
    starts = start_sets(g.n, threshold)
    hit = sum(1 for s in starts if i in spread(g, secure, s, threshold).infected)
    return Fraction(hit, len(starts))
