import random

import pytest
from hypothesis import given, settings, strategies as st

from kway_mlp.coarsening import (CoarseningConfig, CoarseningHierarchy, coarsen,
                                 node_weight_cap, shrink_factor, stop_threshold)
from kway_mlp.generators import grid2d, random_geometric_graph
from kway_mlp.graph import Graph, Partition, edge_cut, project_partition, restrict_partition

import oracles


def test_threshold_and_cap_formulas():
    assert stop_threshold(100_000, 2) == pytest.approx(833.333, abs=1e-3)
    assert stop_threshold(1000, 4) == 240
    assert node_weight_cap(10_000, 2) == 375


def test_small_graph_gives_single_level():
    g = grid2d(5, 5)
    h = coarsen(g, CoarseningConfig(k=2), random.Random(0))
    assert len(h) == 1 and h.coarsest is g


def test_all_edges_forbidden_gives_single_level():
    g = grid2d(20, 20)
    blocks = [(r + c) % 2 for r in range(20) for c in range(20)]  # every edge is cut
    h = coarsen(g, CoarseningConfig(k=2), random.Random(0), forbidden=blocks)
    assert len(h) == 1 and h.stopped_by == "no_progress"


def test_coarsening_reaches_threshold_and_respects_cap():
    g = random_geometric_graph(3000, seed=1)
    k = 2
    h = coarsen(g, CoarseningConfig(k=k), random.Random(0))
    cap = node_weight_cap(g.n, k)
    assert h.coarsest.n < stop_threshold(g.n, k) or h.stopped_by != "threshold"
    for i, partner in enumerate(h.matchings):
        fine = h.graphs[i]
        sizes = [fine.n for fine in h.graphs]
        for u, v in enumerate(partner):
            if v > u:
                assert fine.vwgt[u] + fine.vwgt[v] <= cap
        assert sizes[i + 1] < sizes[i]
    assert h.coarsest.total_node_weight() == g.total_node_weight()


def test_max_levels_limit():
    g = grid2d(40, 40)
    h = coarsen(g, CoarseningConfig(k=2, max_levels=2), random.Random(0))
    assert len(h.mappings) == 2 and h.stopped_by == "max_levels"


def test_shrink_factor_examples():
    def stub(sizes):
        return CoarseningHierarchy([Graph.from_edges(n, []) for n in sizes])

    ratios, mean = shrink_factor(stub([1000, 520, 270]))
    assert ratios[0] == pytest.approx(0.52)
    assert ratios[1] == pytest.approx(270 / 520)
    assert mean == pytest.approx((0.52 * 270 / 520) ** 0.5)
    assert shrink_factor(stub([64, 32, 16, 8]))[1] == pytest.approx(0.5)
    assert shrink_factor(stub([10])) == ([], None)


@given(st.integers(0, 10_000), st.integers(2, 4))
@settings(max_examples=25, deadline=None)
def test_forbidden_cut_edges_preserve_partition(seed, k):
    rng = random.Random(seed)
    n = rng.randint(30, 120)
    g = Graph.from_edges(n, oracles.random_edges(rng, n, p=6 / n))
    block_of = [rng.randrange(k) for _ in range(n)]
    # original_n large so the threshold does not stop early
    h = coarsen(g, CoarseningConfig(k=k, random_levels=rng.randint(0, 2)), rng,
                forbidden=block_of, original_n=1_000_000)
    p = Partition(g, block_of, k, 0.03)
    coarse = p
    for i, mapping in enumerate(h.mappings):
        for u, v in enumerate(h.matchings[i]):
            if v != -1:
                assert coarse.block_of[u] == coarse.block_of[v]
        coarse = restrict_partition(h.graphs[i + 1], mapping, coarse)
    back = coarse
    for i in range(len(h.mappings) - 1, -1, -1):
        back = project_partition(h.graphs[i], h.mappings[i], back)
    assert back.block_of == block_of
    assert edge_cut(h.coarsest, coarse) == edge_cut(g, p)
