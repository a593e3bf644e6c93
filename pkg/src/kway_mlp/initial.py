"""Initial partitioning of the coarsest graph by recursive bisection."""

from __future__ import annotations

import math
from collections import deque

from .fm import k_way_fm, rebalance, two_way_fm
from .graph import Graph, Partition, compute_l_max, edge_cut


class InfeasiblePartitionError(RuntimeError):
    pass


def _induced(graph: Graph, nodes) -> Graph:
    local = {v: i for i, v in enumerate(nodes)}
    edges = []
    for v in nodes:
        lv = local[v]
        for u, w in graph.adj[v]:
            lu = local.get(u)
            if lu is not None and lv < lu:
                edges.append((lv, lu, w))
    return Graph.from_edges(len(nodes), edges, [graph.vwgt[v] for v in nodes])


def _grow_region(graph: Graph, target, bound, rng) -> list:
    """BFS from a random seed until ``target`` weight is reached.

    When the frontier runs dry the growth jumps to a random unassigned node,
    so small components get swallowed whole before a large one is cut.
    """
    n = graph.n
    side = [1] * n
    weight = 0
    order = list(range(n))
    rng.shuffle(order)
    next_seed = 0
    queue = deque()
    vwgt = graph.vwgt
    while weight < target:
        if not queue:
            while next_seed < n and side[order[next_seed]] == 0:
                next_seed += 1
            if next_seed >= n:
                break
            queue.append(order[next_seed])
            next_seed += 1
        v = queue.popleft()
        if side[v] == 0:
            continue
        if weight + vwgt[v] > bound:
            continue
        side[v] = 0
        weight += vwgt[v]
        for u, _ in graph.adj[v]:
            if side[u] == 1:
                queue.append(u)
    return side


def _bisect(graph: Graph, k1: int, k2: int, slack: float, rng) -> list:
    # side bounds follow the proportional targets; when heavy nodes make them
    # unreachable FM minimizes the overload and the caller repairs against L_max
    total = graph.total_node_weight()
    t1 = total * k1 / (k1 + k2)
    t2 = total - t1
    bounds = [t1 * (1 + slack), t2 * (1 + slack)]
    side = _grow_region(graph, t1, bounds[0], rng)
    p = Partition(graph, side, 2, slack, bounds=bounds)
    for _ in range(10):
        d = two_way_fm(graph, p, (0, 1), rng, stall_fraction=1.0)
        if not d.changed:
            break
    return p.block_of


def recursive_bisect(graph: Graph, k: int, epsilon: float, rng, l_max=None) -> Partition:
    """Split into ``ceil(k/2)`` / ``floor(k/2)`` weighted halves recursively.

    Each bisection grows a BFS region to the proportional target weight and
    polishes it with two-way FM. The result may still be infeasible; callers
    repair it.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    block_of = [0] * graph.n
    depth = max(1, math.ceil(math.log2(k))) if k > 1 else 1
    slack = (1 + epsilon) ** (1 / depth) - 1

    def split(nodes, k_sub, first):
        if k_sub == 1 or not nodes:
            for v in nodes:
                block_of[v] = first
            return
        k1 = (k_sub + 1) // 2
        k2 = k_sub - k1
        sub = _induced(graph, nodes)
        side = _bisect(sub, k1, k2, slack, rng)
        left = [v for v, s in zip(nodes, side) if s == 0]
        right = [v for v, s in zip(nodes, side) if s == 1]
        split(left, k1, first)
        split(right, k2, first + k1)

    split(list(range(graph.n)), k, 0)
    return Partition(graph, block_of, k, epsilon, l_max)


def initial_partition(graph: Graph, k: int, epsilon: float, attempts: int, rng,
                      l_max=None, attempt_log: list | None = None) -> Partition:
    """Best feasible partition over ``attempts`` randomized recursive bisections."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if l_max is None:
        l_max = compute_l_max(graph.total_node_weight(), k, epsilon, graph.max_node_weight())
    if k == 1:
        return Partition(graph, [0] * graph.n, 1, epsilon, l_max)
    if graph.max_node_weight() > l_max:
        raise InfeasiblePartitionError("a single node exceeds the block weight bound")
    best = None
    best_key = None
    for _ in range(max(1, attempts)):
        p = recursive_bisect(graph, k, epsilon, rng, l_max)
        if not p.is_feasible():
            rebalance(graph, p, rng)
        k_way_fm(graph, p, rng, max_rounds=3)
        if not p.is_feasible():
            if attempt_log is not None:
                attempt_log.append(None)
            continue
        cut = edge_cut(graph, p)
        if attempt_log is not None:
            attempt_log.append(cut)
        # equal cuts: keep the better balanced one
        key = (cut, max(p.block_weights))
        if best is None or key < best_key:
            best, best_key = p, key
    if best is None:
        raise InfeasiblePartitionError(
            f"no feasible {k}-way partition found in {attempts} attempts")
    return best
