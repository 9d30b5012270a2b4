from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given

from inoculation import _batch
from inoculation import generators as gen
from inoculation.contagion import (infection_counts, infection_probability_enumerated,
                                   infection_probability_exact, spread, start_sets)
from inoculation.errors import PreconditionError
from inoculation.graph import Graph, component_sizes, connected_components

from conftest import graph_and_secure


def test_threshold1_floods_component():
    g = gen.grid(2, 6)
    out = spread(g, {2, 8}, [0], 1)
    assert out.infected == {0, 1, 6, 7}
    assert spread(g, {2, 8}, [2], 1).infected == frozenset()


def test_threshold2_needs_two_infected_neighbours():
    p = gen.path(4)
    assert spread(p, set(), (0, 2), 2).infected == {0, 1, 2}
    assert spread(p, set(), (0, 1), 2).infected == {0, 1}
    # a secure start is wasted; the other start still ignites
    assert spread(p, {0}, (0, 2), 2).infected == {2}


def test_threshold2_bistar_cascade():
    g = gen.bistar(6)
    # two leaves push both centres over the threshold, then every leaf falls
    assert spread(g, set(), (2, 3), 2).infected == set(range(6))
    assert spread(g, {0, 1}, (2, 3), 2).infected == {2, 3}


def test_spread_preconditions():
    g = gen.path(3)
    with pytest.raises(PreconditionError):
        spread(g, set(), (0,), 2)
    with pytest.raises(PreconditionError):
        spread(g, set(), (0, 0), 2)
    with pytest.raises(PreconditionError):
        spread(g, set(), (), 0)
    with pytest.raises(PreconditionError):
        spread(g, {7}, (0,), 1)


def test_start_sets():
    assert start_sets(3, 1) == [(0,), (1,), (2,)]
    assert start_sets(4, 2) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    with pytest.raises(PreconditionError):
        start_sets(4, 3)


def test_star_threshold2_leaf_probability():
    for n in (5, 7, 20):
        g = gen.star(n)
        assert infection_probability_exact(g, {0}, 3, 2) == Fraction(2, n)
        assert infection_probability_exact(g, set(), 3, 2) == Fraction(2, n)


def test_star_threshold2_root_probability():
    n = 7
    # the root falls to every pair: as a start, or via two infected leaves
    assert infection_probability_exact(gen.star(n), set(), 0, 2) == 1
    secured = {1, 2, 3, 4}
    # insecure leaves 5, 6: root needs itself as a start or the pair (5, 6)
    assert infection_probability_exact(gen.star(n), secured, 0, 2) == Fraction(n - 1 + 1, comb(n, 2))


def test_secure_node_probability_rejected():
    with pytest.raises(PreconditionError):
        infection_probability_exact(gen.path(3), {1}, 1, 1)


@given(graph_and_secure(max_n=6))
def test_exact_matches_enumeration(case):
    g, secure = case
    for threshold in (1, 2):
        if threshold == 2 and g.n < 2:
            continue
        for i in set(range(g.n)) - secure:
            assert (infection_probability_exact(g, secure, i, threshold)
                    == infection_probability_enumerated(g, secure, i, threshold))


@given(graph_and_secure(max_n=7))
def test_threshold1_counts_are_component_sizes(case):
    g, secure = case
    counts = infection_counts(g, secure, 1)
    for comp in connected_components(g, secure):
        assert all(counts[v] == len(comp) for v in comp)
    assert all(counts[v] == 0 for v in secure)


@given(graph_and_secure(max_n=8))
def test_batch_labels_match_bfs(case):
    g, secure = case
    ins = np.ones((1, g.n), dtype=bool)
    ins[0, list(secure)] = False
    lab, counts, sizes = _batch.component_sizes(g.padded_neighbors, ins)
    for comp in connected_components(g, secure):
        assert {int(lab[0, v]) for v in comp} == {min(comp)}
    assert sorted(x for x in counts[0].tolist() if x) == sorted(component_sizes(g, secure))


@given(graph_and_secure(max_n=8))
def test_conditional_sizes_secure_nodes(case):
    g, secure = case
    ins = np.ones((1, g.n), dtype=bool)
    ins[0, list(secure)] = False
    csize, _, _ = _batch.conditional_sizes(g.padded_neighbors, ins)
    for v in range(g.n):
        others = secure - {v}
        expect = next(len(c) for c in connected_components(g, others) if v in c)
        assert csize[0, v] == expect


def test_batch_spread_matches_scalar():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (1, 3)])
    secure = {4}
    ins = np.array([[v not in secure for v in range(5)]])
    for pair in start_sets(5, 2):
        seeds = np.zeros((1, 5), dtype=bool)
        seeds[0, list(pair)] = True
        got = set(np.flatnonzero(_batch.spread_batch(g.padded_neighbors, ins, seeds, 2)[0]).tolist())
        assert got == spread(g, secure, pair, 2).infected
