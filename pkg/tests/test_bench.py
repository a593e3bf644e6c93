import csv
import random
import statistics

import pytest

from kway_mlp.bench import (CSV_FIELDS, budgeted_runs, geometric_mean, max_workers,
                            run_effectiveness_test, run_normal_test)
from kway_mlp.generators import grid2d
from kway_mlp.presets import build_config

import oracles


class FakeClock:
    def __init__(self):
        self.now = 0.0

    def __call__(self):
        return self.now


def test_geometric_mean():
    assert geometric_mean([2, 8]) == pytest.approx(4)
    assert geometric_mean([3, 0]) == 0
    xs = [5.0, 7.5, 12.25]
    assert geometric_mean(xs) == pytest.approx(oracles.geomean(xs))
    with pytest.raises(ValueError):
        geometric_mean([])


def test_normal_test_aggregates(tmp_path):
    cuts = {"a": [2, 4], "b": [8, 8], "c": [3, 1]}

    def runner(graph, config, seed):
        return cuts[graph][seed], 1.0

    config = build_config("fast", 2)
    report = run_normal_test([(name, name) for name in cuts], config, 2, runner=runner,
                             csv_path=tmp_path / "out.csv")
    avgs = [statistics.mean(v) for v in cuts.values()]
    assert [r.avg_cut for r in report.instances] == avgs
    assert [r.best_cut for r in report.instances] == [2, 8, 1]
    assert report.geomean_avg_cut == pytest.approx(oracles.geomean(avgs))
    assert report.geomean_best_cut == pytest.approx(oracles.geomean([2, 8, 1]))
    with open(tmp_path / "out.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == CSV_FIELDS and len(rows) == 6
    assert rows[0]["preset"] == "fast" and rows[0]["k"] == "2"


def test_single_repetition():
    report = run_normal_test([("g", grid2d(6, 6))], build_config("fast", 2), 1)
    res = report.instances[0]
    assert res.avg_cut == res.best_cut == res.cuts[0]
    with pytest.raises(ValueError):
        run_normal_test([("g", grid2d(3, 3))], build_config("fast", 2), 0)


def test_max_workers_env(monkeypatch):
    monkeypatch.setenv("KWAY_MLP_THREADS", "3")
    assert max_workers() == 3
    monkeypatch.delenv("KWAY_MLP_THREADS")
    assert max_workers() == 1


def test_slow_run_counts_once():
    clock = FakeClock()

    def run():
        clock.now += 10.0
        return 5, 1.0

    best, _, n_runs, used = budgeted_runs(run, 3.0, random.Random(0), clock)
    assert n_runs == 1 and used == 10.0 and best == 5


def test_expected_runs_match_budget():
    clock = FakeClock()
    e, budget = 0.7, 3.0

    def run():
        clock.now += e
        return 1, 1.0

    rng = random.Random(1)
    counts, times = [], []
    for _ in range(4000):
        _, _, n_runs, used = budgeted_runs(run, budget, rng, clock)
        counts.append(n_runs)
        times.append(used)
    assert statistics.mean(counts) == pytest.approx(budget / e, rel=0.03)
    assert statistics.mean(times) == pytest.approx(budget, rel=0.03)


def test_effectiveness_symmetry():
    clock = FakeClock()

    def runner(graph, config, seed):
        clock.now += 1.0
        return random.Random(seed).randint(10, 20), 1.0

    rng = random.Random(0)
    config = build_config("fast", 2)
    wins = 0
    for i in range(60):
        reports = run_effectiveness_test([("g", None)], {"x": config, "y": config}, rng,
                                         rounds=5, runner=runner, clock=clock)
        x, y = (reports[n].geomean_avg_cut for n in "xy")
        wins += x < y
        wins -= y < x
    assert abs(wins) < 20


def test_effectiveness_needs_two_configs():
    with pytest.raises(ValueError):
        run_effectiveness_test([], {"x": build_config("fast", 2)}, random.Random(0))
