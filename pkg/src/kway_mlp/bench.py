"""Normal and effectiveness benchmark harness with geometric-mean scoring."""

from __future__ import annotations

import csv
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .graph import Graph, edge_cut
from .matching import EXPANSION2, INNER_OUTER
from .presets import ACTIVE_BLOCK, AlgorithmConfig
from .scheduling import partition_graph

CSV_FIELDS = ("graph", "k", "preset", "seed", "rep", "cut", "balance", "time_s")


def geometric_mean(values) -> float:
    values = list(values)
    if not values:
        raise ValueError("geometric mean of an empty sequence")
    if any(v < 0 for v in values):
        raise ValueError("geometric mean needs non-negative values")
    if any(v == 0 for v in values):
        return 0.0
    return math.exp(sum(math.log(v) for v in values) / len(values))


def max_workers() -> int:
    """Harness parallelism, capped by ``KWAY_MLP_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("KWAY_MLP_THREADS", "1")))
    except ValueError:
        return 1


def default_runner(graph: Graph, config: AlgorithmConfig, seed: int) -> tuple:
    """Partition once; returns ``(cut, balance)``."""
    p = partition_graph(graph, config.replace(seed=seed), rng=random.Random(seed))
    return edge_cut(graph, p), p.balance()


@dataclass
class InstanceResult:
    graph: str
    k: int
    cuts: list = field(default_factory=list)
    balances: list = field(default_factory=list)
    times: list = field(default_factory=list)

    @property
    def avg_cut(self) -> float:
        return sum(self.cuts) / len(self.cuts)

    @property
    def best_cut(self):
        return min(self.cuts)

    @property
    def avg_time(self) -> float:
        return sum(self.times) / len(self.times)


@dataclass
class BenchmarkReport:
    preset: str
    instances: list
    rows: list

    @property
    def geomean_avg_cut(self) -> float:
        return geometric_mean(r.avg_cut for r in self.instances)

    @property
    def geomean_best_cut(self) -> float:
        return geometric_mean(r.best_cut for r in self.instances)

    @property
    def geomean_time(self) -> float:
        return geometric_mean(r.avg_time for r in self.instances)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            w.writeheader()
            w.writerows(self.rows)


def _timed(args):
    runner, graph, config, seed, clock = args
    start = clock()
    cut, balance = runner(graph, config, seed)
    return cut, balance, clock() - start


def run_normal_test(instances, config: AlgorithmConfig, repetitions: int, runner=None,
                    clock=time.perf_counter, seeds=None, csv_path=None) -> BenchmarkReport:
    """Run every ``(name, graph)`` instance ``repetitions`` times with seeds 0, 1, ...

    Cells run in a process pool when ``KWAY_MLP_THREADS`` > 1.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    runner = runner or default_runner
    seeds = list(seeds) if seeds is not None else list(range(repetitions))
    cells = [(name, graph, rep, seeds[rep]) for name, graph in instances
             for rep in range(repetitions)]
    jobs = [(runner, graph, config, seed, clock) for _, graph, _, seed in cells]
    workers = max_workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_timed, jobs))
    else:
        outcomes = [_timed(job) for job in jobs]
    results = {}
    rows = []
    for (name, _, rep, seed), (cut, balance, elapsed) in zip(cells, outcomes):
        res = results.setdefault(name, InstanceResult(name, config.k))
        res.cuts.append(cut)
        res.balances.append(balance)
        res.times.append(elapsed)
        rows.append({"graph": name, "k": config.k, "preset": config.preset, "seed": seed,
                     "rep": rep, "cut": cut, "balance": f"{balance:.6f}",
                     "time_s": f"{elapsed:.6f}"})
    report = BenchmarkReport(config.preset, list(results.values()), rows)
    if csv_path is not None:
        report.write_csv(csv_path)
    return report


def budgeted_runs(run, budget: float, rng, clock=time.perf_counter) -> tuple:
    """Repeat ``run()`` (returning ``(cut, balance)``) inside a time budget.

    The first run always happens. Afterwards, with ``r`` the remaining
    budget and ``e`` the mean duration so far, another run starts with
    probability ``min(1, r/e)``. Returns ``(best_cut, balance, n_runs, used)``.
    """
    best = None
    used = 0.0
    n_runs = 0
    while True:
        if n_runs:
            remaining = budget - used
            if remaining <= 0:
                break
            expected = used / n_runs
            if expected > 0 and rng.random() >= min(1.0, remaining / expected):
                break
        start = clock()
        cut, balance = run()
        used += clock() - start
        n_runs += 1
        if best is None or cut < best[0]:
            best = (cut, balance)
    return best[0], best[1], n_runs, used


def run_effectiveness_test(instances, configs: dict, rng, rounds: int = 5, runner=None,
                           clock=time.perf_counter, csv_path=None) -> dict:
    """Compare configs under equal time: each gets ``3t`` per round.

    ``t`` is the slowest single run among the configs on that instance.
    Returns one ``BenchmarkReport`` per config name whose per-round cut is
    the best cut found within the budget.
    """
    if len(configs) < 2:
        raise ValueError("effectiveness tests need at least two configurations")
    runner = runner or default_runner
    reports = {name: BenchmarkReport(name, [], []) for name in configs}
    for inst_name, graph in instances:
        t = 0.0
        for config in configs.values():
            start = clock()
            runner(graph, config, rng.getrandbits(31))
            t = max(t, clock() - start)
        budget = 3 * t
        for name, config in configs.items():
            res = InstanceResult(inst_name, config.k)
            for rep in range(rounds):
                base = rng.getrandbits(31)
                seeds = random.Random(base)

                def run(config=config, seeds=seeds):
                    return runner(graph, config, seeds.getrandbits(31))
                cut, balance, _, used = budgeted_runs(run, budget, rng, clock)
                res.cuts.append(cut)
                res.balances.append(balance)
                res.times.append(used)
                reports[name].rows.append({
                    "graph": inst_name, "k": config.k, "preset": name, "seed": base,
                    "rep": rep, "cut": cut, "balance": f"{balance:.6f}",
                    "time_s": f"{used:.6f}"})
            reports[name].instances.append(res)
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            w.writeheader()
            for rep in reports.values():
                w.writerows(rep.rows)
    return reports


def flow_test_config(k: int, epsilon: float = 0.03, seed: int = 0, flow: bool = False,
                     most_balanced: bool = False, alpha_prime: float = 8.0,
                     fm: bool = True) -> AlgorithmConfig:
    """Reduced configuration for isolating the effect of flow refinement.

    GPA with the strong ratings, five initial attempts, active-block
    scheduling with two-way FM (5% stall) and no k-way or multi-try search.
    """
    return AlgorithmConfig(
        preset="flow-test", k=k, epsilon=epsilon, seed=seed,
        first_level_rating=INNER_OUTER, rating=EXPANSION2,
        initial_attempts=5, kway_rounds=0, scheduler=ACTIVE_BLOCK,
        two_way_fm=fm, fm_stall_fraction=0.05, multitry=False,
        flow=flow, alpha_prime=alpha_prime, most_balanced=most_balanced,
        cycle_type="V", cycles=1)
