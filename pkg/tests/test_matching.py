import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from kway_mlp.graph import Graph, is_valid_matching, matching_pairs
from kway_mlp.matching import (EXPANSION2, INNER_OUTER, gpa_matching, greedy_matching,
                               matching_score, optimal_path_matching, random_matching,
                               rate_edge, rate_edges)

import oracles


def scored(graph, scores):
    """Rated edge list for a graph whose edges are given in ``scores`` order."""
    edges = list(graph.edges())
    return [(s, u, v) for s, (u, v, _) in zip(scores, edges)]


def test_expansion2_values():
    g = Graph.from_edges(2, [(0, 1, 2)], [1, 2])
    assert rate_edge(g, 0, 1, 2, EXPANSION2) == 2.0
    unit = Graph.from_edges(2, [(0, 1)])
    assert rate_edge(unit, 0, 1, 1, EXPANSION2) == 1.0


def test_inner_outer_isolated_pair_is_infinite():
    g = Graph.from_edges(2, [(0, 1)])
    assert rate_edge(g, 0, 1, 1, INNER_OUTER) == math.inf


def test_inner_outer_formula():
    # star centre 0 with leaves 1..3, edge (0,1) has weight 2
    g = Graph.from_edges(4, [(0, 1, 2), (0, 2), (0, 3)])
    # Out(0)=4, Out(1)=2 -> 2/(4+2-4)
    assert rate_edge(g, 0, 1, 2, INNER_OUTER) == pytest.approx(1.0)
    assert rate_edge(g, 0, 2, 1, INNER_OUTER) == pytest.approx(1 / 3)


def test_unknown_rating():
    with pytest.raises(ValueError):
        rate_edge(Graph.from_edges(2, [(0, 1)]), 0, 1, 1, "nope")


def test_gpa_path_prefers_middle_edge():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    partner = gpa_matching(g, [(1, 0, 1), (10, 1, 2), (1, 2, 3)], random.Random(0))
    assert matching_pairs(partner) == [(1, 2)]


def test_gpa_single_edge():
    g = Graph.from_edges(2, [(0, 1)])
    assert gpa_matching(g, rate_edges(g, EXPANSION2), random.Random(0)) == [1, 0]


def test_gpa_even_cycle():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    rated = [(5, 0, 1), (1, 1, 2), (5, 2, 3), (1, 0, 3)]
    partner = gpa_matching(g, rated, random.Random(1))
    assert sorted(matching_pairs(partner)) == [(0, 1), (2, 3)]
    assert matching_score(rated, partner) == 10


def test_optimal_path_matching_examples():
    assert optimal_path_matching([3, 4]) == (4, [1])
    assert optimal_path_matching([3, 4, 3]) == (6, [0, 2])
    assert optimal_path_matching([]) == (0, [])
    assert optimal_path_matching([5, 1, 5, 1], cycle=True)[0] == 10
    with pytest.raises(ValueError):
        optimal_path_matching([1, 1, 1], cycle=True)


@given(st.lists(st.integers(0, 20), max_size=12), st.booleans())
@settings(max_examples=100, deadline=None)
def test_path_dp_matches_brute_force(scores, cycle):
    if cycle and (len(scores) % 2 or len(scores) < 4):
        return
    m = len(scores)
    n = m if cycle else m + 1
    edges = [(s, i, (i + 1) % n) for i, s in enumerate(scores)]
    total, chosen = optimal_path_matching(scores, cycle)
    assert total == oracles.max_matching_weight(n, edges)
    assert sum(scores[i] for i in chosen) == total
    ends = [e for i in chosen for e in edges[i][1:]]
    assert len(ends) == len(set(ends))


def test_random_matching_examples():
    assert random_matching(Graph.from_edges(3, []), random.Random(0)) == [-1, -1, -1]
    assert random_matching(Graph.from_edges(2, [(0, 1)]), random.Random(0)) == [1, 0]


def test_random_matching_valid_over_seeds():
    for seed in range(100):
        rng = random.Random(seed)
        n = rng.randint(2, 40)
        g = Graph.from_edges(n, oracles.random_edges(rng, n, p=0.2))
        partner = random_matching(g, rng)
        assert is_valid_matching(g, partner)
        # maximal: no edge with both ends free
        assert all(partner[u] != -1 or partner[v] != -1 for u, v, _ in g.edges())


def test_gpa_beats_greedy_and_is_deterministic():
    for seed in range(100):
        rng = random.Random(seed)
        n = rng.randint(2, 40)
        g = Graph.from_edges(n, oracles.random_edges(rng, n, p=0.25, w_max=5),
                             [rng.randint(1, 3) for _ in range(n)])
        rated = rate_edges(g, EXPANSION2)
        gpa = gpa_matching(g, rated, random.Random(seed))
        greedy = greedy_matching(g, rated, random.Random(seed))
        assert is_valid_matching(g, gpa)
        assert matching_score(rated, gpa) >= matching_score(rated, greedy) - 1e-9
        assert gpa == gpa_matching(g, rated, random.Random(seed))


def test_gpa_respects_eligibility():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    partner = gpa_matching(g, rate_edges(g, EXPANSION2), random.Random(0),
                           eligible=lambda u, v: {u, v} != {0, 1})
    assert partner[0] == -1
