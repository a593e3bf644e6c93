import random
import warnings

import pytest

from kway_mlp.generators import grid2d, random_geometric_graph
from kway_mlp.graph import Graph, Partition, build_quotient_graph, edge_cut
from kway_mlp.presets import build_config
from kway_mlp.scheduling import (CycleStats, active_block_schedule, cycle_cost_bound,
                                 partition_graph, quotient_random_schedule, refine, run_cycle)

import oracles


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def start(g, k, seed):
    rng = random.Random(seed)
    block_of = oracles.balanced_assignment(g.n, k, g.vwgt, rng)
    return rng, Partition(g, block_of, k, 0.03)


def test_v_cycle_on_four_path():
    config = build_config("strong", 2).replace(cycle_type="V", cycles=1)
    g = path(4)
    assert oracles.best_bisection(4, list(g.edges()), 0.03) == 1
    for seed in range(5):
        assert edge_cut(g, run_cycle(g, config, random.Random(seed))) == 1


def test_quotient_schedule_locally_optimal():
    g = path(4)
    p = Partition(g, [0, 0, 1, 1], 2, 0.03)
    d = quotient_random_schedule(g, p, build_config("strong", 2), random.Random(0))
    assert not d.changed and len(d.stats["pass_orders"]) == 1


def test_quotient_schedule_pass_is_permutation():
    g = grid2d(12, 12)
    for seed in range(5):
        rng, p = start(g, 4, seed)
        before = edge_cut(g, p)
        edges = set(build_quotient_graph(g, p).edges)
        d = quotient_random_schedule(g, p, build_config("eco", 4), rng)
        first = d.stats["pass_orders"][0]
        assert sorted(first) == sorted(edges) and len(first) == len(set(first))
        assert edge_cut(g, p) <= before and p.is_feasible()


def test_active_block_terminates_after_quiet_round():
    g = path(4)
    p = Partition(g, [0, 0, 1, 1], 2, 0.03)
    d = active_block_schedule(g, p, build_config("strong", 2), random.Random(0))
    assert len(d.stats["rounds"]) == 1 and d.gain == 0


def test_active_block_reactivates_changed_blocks():
    g = grid2d(10, 10)
    config = build_config("strong", 4)
    for seed in range(5):
        rng, p = start(g, 4, seed)
        before = edge_cut(g, p)
        d = active_block_schedule(g, p, config, rng)
        rounds = d.stats["rounds"]
        assert len(rounds) <= config.active_block_max_rounds
        # a round with gain is always followed by another round
        for (_, gain), nxt in zip(rounds, rounds[1:] + [None]):
            if gain > 0:
                assert nxt is not None
        assert rounds[-1][1] == 0 or len(rounds) == config.active_block_max_rounds
        assert edge_cut(g, p) == before - d.gain <= before


def test_refine_never_worse():
    for seed in range(40):
        rng, n, edges, weights, k = oracles.random_instance(seed, weighted=True)
        g = Graph.from_edges(n, edges, weights)
        p = Partition(g, oracles.balanced_assignment(n, k, weights, rng), k, 0.03)
        before = edge_cut(g, p)
        refine(g, p, build_config(rng.choice(["strong", "eco", "fast"]), k), rng)
        assert edge_cut(g, p) <= before and p.is_feasible()


def test_w_and_f_trial_counts():
    g = random_geometric_graph(6000, seed=2)
    base = build_config("fast", 2)
    for cycle in ("W", "F"):
        stats = CycleStats()
        p = run_cycle(g, base.replace(cycle_type=cycle), random.Random(1), stats=stats)
        assert p.is_feasible()
        levels = sorted(stats.calls_per_level)
        assert levels[0] == 0 and stats.calls_per_level[0] == 1
        if cycle == "W":
            for lvl in levels[1:]:
                assert stats.calls_per_level[lvl] == 2 * stats.second_trials_per_level[lvl]
                assert stats.second_trials_per_level[lvl] >= 1
        else:
            # at most one branching per level; level j*d is entered j+1 times
            assert all(stats.second_trials_per_level[lvl] <= 1 for lvl in levels)
            assert sum(stats.second_trials_per_level.values()) >= 1
            for j, lvl in enumerate(levels):
                assert stats.calls_per_level[lvl] == j + 1
        assert all(lvl % base.level_split == 0 for lvl in levels)


def test_inherited_partition_is_not_worse():
    g = grid2d(30, 30)
    for cycle in ("V", "F", "W"):
        config = build_config("eco", 4).replace(cycle_type=cycle)
        for seed in range(3):
            rng, p = start(g, 4, seed)
            stats = CycleStats()
            out = run_cycle(g, config, rng, inherited=p, stats=stats)
            assert out.is_feasible() and edge_cut(g, out) <= edge_cut(g, p)
            assert stats.initial_partitionings == 0


def test_iterated_v_cycles_not_worse():
    g = grid2d(24, 24)
    config = build_config("eco", 4)
    for seed in range(4):
        once = partition_graph(g, config.replace(cycles=1), rng=random.Random(seed))
        thrice = partition_graph(g, config.replace(cycles=3), rng=random.Random(seed))
        assert edge_cut(g, thrice) <= edge_cut(g, once)


def test_partition_graph_k1():
    p = partition_graph(path(5), build_config("fast", 2).replace(k=1))
    assert p.block_of == [0] * 5


def test_cost_bounds():
    assert cycle_cost_bound(0.5, 1, "F").factor == pytest.approx(2.0)
    with pytest.warns(UserWarning):
        w = cycle_cost_bound(0.4, 2, "W")
    assert w.regime == "linear" and w.factor == pytest.approx(0.84 / 0.68)
    assert cycle_cost_bound(0.5, 1, "W").regime == "n_log_n"
    poly = cycle_cost_bound(0.8, 1, "W")
    assert poly.regime == "polynomial"
    assert poly.exponent == pytest.approx(0.6931471805599453 / 0.2231435513142097)
    assert cycle_cost_bound(0.7, 2, "V").factor == 1


def test_cost_bound_warns_outside_range():
    with pytest.warns(UserWarning):
        cycle_cost_bound(0.4, 2, "W")
    with pytest.warns(UserWarning):
        cycle_cost_bound(0.3, 1, "F")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cycle_cost_bound(0.6, 2, "F")
