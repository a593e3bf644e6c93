"""Refinement scheduling over the quotient graph and global V/W/F-cycles."""

from __future__ import annotations

import math
import random
import warnings
from collections import Counter
from dataclasses import dataclass, field

from .coarsening import CoarseningConfig, coarsen, stop_threshold
from .flow import adaptive_flow_iterations
from .fm import Delta, k_way_fm, multi_try_fm, rebalance, two_way_fm
from .graph import (Graph, Partition, build_quotient_graph, compute_l_max, edge_cut,
                    is_boundary, project_partition, restrict_partition)
from .initial import InfeasiblePartitionError, initial_partition
from .presets import ACTIVE_BLOCK, QUOTIENT_RANDOM, AlgorithmConfig


def pairwise_improvement(graph: Graph, partition: Partition, pair, config: AlgorithmConfig,
                         rng) -> Delta:
    """Two-way FM followed by adaptive flow iterations on one block pair."""
    total = Delta()
    if config.two_way_fm:
        total.extend(two_way_fm(graph, partition, pair, rng,
                                stall_fraction=config.fm_stall_fraction,
                                stall_steps=config.fm_stall_steps))
    if config.flow:
        total.extend(adaptive_flow_iterations(
            graph, partition, pair, rng, alpha_prime=config.alpha_prime,
            max_iterations=config.flow_max_iterations,
            most_balanced=config.most_balanced,
            repetitions=config.toposort_repetitions,
            accept_equal_cut=config.flow_accept_equal_cut,
            alpha_start=config.flow_alpha_start))
    return total


def _pair_boundary(graph: Graph, partition: Partition, pair) -> list:
    a, b = pair
    block_of = partition.block_of
    return [v for v, bv in enumerate(block_of)
            if (bv == a or bv == b) and is_boundary(graph, block_of, v)]


def quotient_random_schedule(graph: Graph, partition: Partition, config: AlgorithmConfig,
                             rng, max_passes: int | None = None) -> Delta:
    """Refine every quotient edge once per pass, in random order.

    Passes repeat until one changes nothing or ``max_passes`` is reached.
    """
    passes = config.quotient_max_passes if max_passes is None else max_passes
    total = Delta()
    total.stats["pass_orders"] = []
    for _ in range(passes):
        pairs = list(build_quotient_graph(graph, partition).edges)
        rng.shuffle(pairs)
        total.stats["pass_orders"].append(pairs)
        changed = False
        for pair in pairs:
            d = pairwise_improvement(graph, partition, pair, config, rng)
            if d.changed:
                changed = True
                total.extend(d)
        if not changed:
            break
    return total


def active_block_schedule(graph: Graph, partition: Partition, config: AlgorithmConfig,
                          rng) -> Delta:
    """Only revisit block pairs next to blocks that changed in the last round."""
    active = [True] * partition.k
    total = Delta()
    rounds = []
    while any(active) and len(rounds) < config.active_block_max_rounds:
        pairs = [p for p in build_quotient_graph(graph, partition).edges
                 if active[p[0]] or active[p[1]]]
        active = [False] * partition.k
        rng.shuffle(pairs)
        round_gain = 0
        for pair in pairs:
            d = pairwise_improvement(graph, partition, pair, config, rng)
            if config.multitry:
                todo = _pair_boundary(graph, partition, pair)
                d.extend(multi_try_fm(graph, partition, todo, rng,
                                      alpha=config.multitry_alpha,
                                      max_rounds=config.multitry_rounds))
            for blk in d.changed_blocks:
                active[blk] = True
            round_gain += d.gain
            total.extend(d)
        rounds.append((len(pairs), round_gain))
    total.stats["rounds"] = rounds
    return total


def refine(graph: Graph, partition: Partition, config: AlgorithmConfig, rng) -> Delta:
    """Refinement applied after each uncontraction step."""
    total = Delta()
    if not partition.is_feasible():
        total.extend(rebalance(graph, partition, rng))
    if config.kway_rounds > 0:
        total.extend(k_way_fm(graph, partition, rng, alpha=config.kway_alpha,
                              max_rounds=config.kway_rounds,
                              stall_steps=config.kway_stall_steps))
    if partition.k > 1:
        if config.scheduler == ACTIVE_BLOCK:
            total.extend(active_block_schedule(graph, partition, config, rng))
        elif config.scheduler == QUOTIENT_RANDOM:
            total.extend(quotient_random_schedule(graph, partition, config, rng))
    return total


# --- global search ------------------------------------------------------------------

@dataclass
class CycleStats:
    """Instrumentation of one global-search run."""

    calls_per_level: Counter = field(default_factory=Counter)
    second_trials_per_level: Counter = field(default_factory=Counter)
    second_trial_wins: Counter = field(default_factory=Counter)
    level_sizes: list = field(default_factory=list)
    initial_partitionings: int = 0


def _score(graph: Graph, p: Partition) -> tuple:
    return (p.overload(), edge_cut(graph, p))


class _Cycle:
    def __init__(self, graph: Graph, config: AlgorithmConfig, cycle_type: str, d: int,
                 l_max, stats: CycleStats, side_rng):
        self.n0 = graph.n
        # extra trials draw from their own stream so the first trial of every
        # split replays exactly what a V-cycle with the same seed would do
        self.side_rng = side_rng
        self.config = config
        self.cycle_type = cycle_type
        self.d = d
        self.l_max = l_max
        self.stats = stats
        self.threshold = stop_threshold(graph.n, config.k)

    def coarsen(self, graph, level, forbidden, rng):
        steps = None if self.cycle_type == "V" else self.d
        cfg = CoarseningConfig(self.config.k, self.config.random_matching_levels,
                               self.config.first_level_rating, self.config.rating, steps)
        h = coarsen(graph, cfg, rng, forbidden=forbidden, level_offset=level,
                    original_n=self.n0)
        self.stats.level_sizes.append([g.n for g in h.graphs])
        return h

    def small(self, hierarchy) -> bool:
        return hierarchy.coarsest.n < self.threshold or hierarchy.stopped_by == "no_progress"

    def uncoarsen(self, hierarchy, coarse_partition, rng) -> Partition:
        p = coarse_partition
        for i in range(len(hierarchy.mappings) - 1, -1, -1):
            p = project_partition(hierarchy.graphs[i], hierarchy.mappings[i], p)
            refine(hierarchy.graphs[i], p, self.config, rng)
        return p

    def restrict(self, hierarchy, partition) -> Partition:
        p = partition
        for i, mapping in enumerate(hierarchy.mappings):
            p = restrict_partition(hierarchy.graphs[i + 1], mapping, p)
        return p

    def initial(self, graph, rng) -> Partition:
        self.stats.initial_partitionings += 1
        return initial_partition(graph, self.config.k, self.config.epsilon,
                                 self.config.initial_attempts, rng, self.l_max)

    def trial(self, graph: Graph, partition: Partition | None, level: int, rng) -> Partition:
        """Coarsen ``d`` levels, solve the coarse graph (twice when branching), refine back up.

        The second trial on the coarse graph inherits the first one's
        partition, so its coarsening keeps the cut edges and its result is
        never worse.
        """
        self.stats.calls_per_level[level] += 1
        forbidden = partition.block_of if partition is not None else None
        h = self.coarsen(graph, level, forbidden, rng)
        if not h.mappings:
            p = partition.copy() if partition is not None else self.initial(graph, rng)
            refine(graph, p, self.config, rng)
            return p
        coarse = h.coarsest
        coarse_p = self.restrict(h, partition) if partition is not None else None
        if self.small(h):
            if coarse_p is None:
                coarse_p = self.initial(coarse, rng)
            refine(coarse, coarse_p, self.config, rng)
        else:
            deeper = level + len(h.mappings)
            coarse_p = self.trial(coarse, coarse_p, deeper, rng)
            branch = self.cycle_type == "W" or (
                self.cycle_type == "F" and self.stats.calls_per_level[deeper] < 2)
            if branch:
                self.stats.second_trials_per_level[deeper] += 1
                side = random.Random(self.side_rng.getrandbits(64))
                other = self.trial(coarse, coarse_p, deeper, side)
                if _score(coarse, other) < _score(coarse, coarse_p):
                    self.stats.second_trial_wins[deeper] += 1
                    coarse_p = other
        return self.uncoarsen(h, coarse_p, rng)


def run_cycle(graph: Graph, config: AlgorithmConfig, rng, inherited: Partition | None = None,
              cycle_type: str | None = None, level_split: int | None = None,
              stats: CycleStats | None = None) -> Partition:
    """One V-, W- or F-cycle.

    With ``inherited`` the cut edges of that partition are never contracted
    and no initial partitioning happens, so the result is never worse than
    the inherited partition.
    """
    cycle_type = cycle_type or config.cycle_type
    if cycle_type not in ("V", "W", "F"):
        raise ValueError(f"unknown cycle type {cycle_type!r}")
    d = level_split or config.level_split
    l_max = compute_l_max(graph.total_node_weight(), config.k, config.epsilon,
                          graph.max_node_weight())
    if inherited is not None:
        inherited = Partition(graph, inherited.block_of, config.k, config.epsilon, l_max)
    stats = stats if stats is not None else CycleStats()
    side_rng = random.Random(rng.getrandbits(64))
    cycle = _Cycle(graph, config, cycle_type, d, l_max, stats, side_rng)
    result = cycle.trial(graph, inherited, 0, rng)
    if not result.is_feasible():
        rebalance(graph, result, rng)
        refine(graph, result, config, rng)
    if inherited is not None and _score(graph, inherited) < _score(graph, result):
        result = inherited.copy()
    return result


def partition_graph(graph: Graph, config: AlgorithmConfig, inherited: Partition | None = None,
                    rng=None, stats: CycleStats | None = None) -> Partition:
    """Run ``config.cycles`` global cycles, each reusing the previous result."""
    if rng is None:
        rng = random.Random(config.seed)
    if config.k == 1:
        return Partition(graph, [0] * graph.n, 1, config.epsilon)
    p = inherited
    for _ in range(max(1, config.cycles)):
        p = run_cycle(graph, config, rng, inherited=p, stats=stats)
    if not p.is_feasible():
        raise InfeasiblePartitionError("could not reach a feasible partition")
    return p


# --- cost model -----------------------------------------------------------------------

@dataclass(frozen=True)
class CycleCost:
    """Cost of a cycle relative to one V-cycle.

    ``regime`` is ``"linear"`` when ``factor`` is a constant bound,
    ``"n_log_n"`` for the boundary case, and ``"polynomial"`` when the
    W-cycle grows like ``n ** exponent``.
    """

    regime: str
    factor: float | None = None
    exponent: float | None = None


def cycle_cost_bound(a: float, d: int, cycle_type: str) -> CycleCost:
    """Cycle time over V-cycle time for shrink factor ``a`` and level split ``d``."""
    if not 0.5 <= a < 1:
        warnings.warn(f"shrink factor {a} outside [1/2, 1)", stacklevel=2)
    ad = a ** d
    if cycle_type == "V":
        return CycleCost("linear", 1.0)
    if cycle_type == "F":
        return CycleCost("linear", 1 / (1 - ad))
    if cycle_type != "W":
        raise ValueError(f"unknown cycle type {cycle_type!r}")
    if math.isclose(2 * ad, 1.0, rel_tol=1e-12, abs_tol=1e-12):
        return CycleCost("n_log_n")
    if 2 * ad < 1:
        return CycleCost("linear", (1 - ad) / (1 - 2 * ad))
    return CycleCost("polynomial", exponent=math.log(2) / math.log(1 / ad))
