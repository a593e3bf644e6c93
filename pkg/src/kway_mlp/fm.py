"""FM-style local search: two-way TopGain FM, k-way FM and multi-try FM."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .graph import Graph, Partition, is_boundary


@dataclass
class Delta:
    """Committed moves of one refinement call and the cut reduction they bought."""

    moves: list = field(default_factory=list)
    gain: float = 0
    stats: dict = field(default_factory=dict)

    @property
    def changed(self) -> bool:
        return bool(self.moves)

    @property
    def changed_blocks(self) -> set:
        blocks = set()
        for _, src, dst in self.moves:
            blocks.add(src)
            blocks.add(dst)
        return blocks

    def extend(self, other: "Delta") -> None:
        self.moves.extend(other.moves)
        self.gain += other.gain


class GainPQ:
    """Max-priority queue of nodes keyed by gain.

    Binary heap with lazy invalidation: an update pushes a fresh entry and
    bumps the node's version, stale entries are skipped on pop. Equal gains
    come out in random order.
    """

    def __init__(self, rng):
        self._heap = []
        self._version = {}
        self.gain = {}
        self._rng = rng
        self._counter = 0

    def __len__(self) -> int:
        return len(self._version)

    def __contains__(self, v) -> bool:
        return v in self._version

    def push(self, v, gain) -> None:
        self._counter += 1
        self._version[v] = self._counter
        self.gain[v] = gain
        heapq.heappush(self._heap, (-gain, self._rng.random(), self._counter, v))

    update = push

    def remove(self, v) -> None:
        if v in self._version:
            del self._version[v]
            del self.gain[v]

    def _clean(self) -> None:
        heap = self._heap
        while heap and self._version.get(heap[0][3]) != heap[0][2]:
            heapq.heappop(heap)

    def top(self):
        self._clean()
        if not self._heap:
            return None
        return self._heap[0][3], -self._heap[0][0]

    def pop(self):
        self._clean()
        neg, _, _, v = heapq.heappop(self._heap)
        del self._version[v]
        del self.gain[v]
        return v, -neg


def stopping_rule_check(p: int, mu: float, sigma2: float, alpha: float, beta: float) -> bool:
    """Random-walk stopping test: stop once ``p * mu^2 > alpha * sigma^2 + beta``."""
    return p * mu * mu > alpha * sigma2 + beta


class StoppingRule:
    """Running mean/variance of step gains since the last improvement."""

    def __init__(self, alpha: float, n: int):
        self.alpha = alpha
        self.beta = math.log(max(n, 1))
        self.reset()

    def reset(self) -> None:
        self.p = 0
        self.mu = 0.0
        self._m2 = 0.0

    @property
    def sigma2(self) -> float:
        return self._m2 / self.p if self.p else 0.0

    def push(self, gain) -> None:
        self.p += 1
        d = gain - self.mu
        self.mu += d / self.p
        self._m2 += d * (gain - self.mu)

    def should_stop(self) -> bool:
        return self.p >= 1 and stopping_rule_check(self.p, self.mu, self.sigma2, self.alpha, self.beta)


def gain(graph: Graph, partition: Partition, v: int, target: int):
    """Cut decrease when moving ``v`` into ``target``."""
    own = partition.block_of[v]
    if target == own:
        raise ValueError("target equals the current block")
    block_of = partition.block_of
    g = 0
    for u, w in graph.adj[v]:
        bu = block_of[u]
        if bu == target:
            g += w
        elif bu == own:
            g -= w
    return g


def _overload_of(weight, bound):
    return weight - bound if weight > bound else 0


def _move_allowed(bw, bounds, src, dst, w) -> bool:
    if bw[dst] + w <= bounds[dst]:
        return True
    # an overloaded block may shed weight as long as the target ends up lighter
    return bw[src] > bounds[src] and bw[dst] + w < bw[src]


def _rollback(partition: Partition, log, keep: int) -> None:
    for v, src, _ in reversed(log[keep:]):
        partition.move(v, src)
    del log[keep:]


def two_way_fm(graph: Graph, partition: Partition, pair, rng,
               stall_fraction: float | None = 0.05, stall_steps: int | None = None) -> Delta:
    """FM between two blocks with TopGain queue selection.

    Gives up after ``stall_steps`` moves without improvement, or after
    ``stall_fraction`` of the pair's node count when no step count is given,
    and rolls back to the best state seen. States are ranked by overload
    first and cut second, so a feasible start never ends worse.
    """
    a, b = pair
    block_of = partition.block_of
    bw = partition.block_weights
    bounds = partition.bounds
    adj = graph.adj
    vwgt = graph.vwgt

    def pair_gain(v):
        own = block_of[v]
        other = b if own == a else a
        g = 0
        for u, w in adj[v]:
            bu = block_of[u]
            if bu == other:
                g += w
            elif bu == own:
                g -= w
        return g

    start = []
    for v, bv in enumerate(block_of):
        if bv != a and bv != b:
            continue
        other = b if bv == a else a
        for u, _ in adj[v]:
            if block_of[u] == other:
                start.append(v)
                break
    if not start:
        return Delta()
    rng.shuffle(start)
    queues = {a: GainPQ(rng), b: GainPQ(rng)}
    for v in start:
        queues[block_of[v]].push(v, pair_gain(v))

    if stall_steps is None:
        pair_size = sum(1 for x in block_of if x == a or x == b)
        limit = max(1, int(stall_fraction * pair_size))
    else:
        limit = stall_steps

    touched = set(start)
    log = []
    cut_delta = 0
    overload = _overload_of(bw[a], bounds[a]) + _overload_of(bw[b], bounds[b])
    best = (overload, 0)
    best_idx = 0
    since_best = 0
    while True:
        qa, qb = queues[a], queues[b]
        ta, tb = qa.top(), qb.top()
        if ta is None and tb is None:
            break
        if bw[a] > bounds[a] or bw[b] > bounds[b]:
            src = a if bw[a] >= bw[b] else b
            if queues[src].top() is None:
                src = b if src == a else a
        elif ta is None:
            src = b
        elif tb is None:
            src = a
        elif ta[1] != tb[1]:
            src = a if ta[1] > tb[1] else b
        else:
            src = a if rng.random() < 0.5 else b
        dst = b if src == a else a
        v, g = queues[src].pop()
        if not _move_allowed(bw, bounds, src, dst, vwgt[v]):
            continue
        partition.move(v, dst)
        log.append((v, src, dst))
        cut_delta -= g
        for u, w in adj[v]:
            bu = block_of[u]
            if bu == src:
                q = queues[src]
                if u in q:
                    q.update(u, q.gain[u] + 2 * w)
                elif u not in touched:
                    touched.add(u)
                    q.push(u, pair_gain(u))
            elif bu == dst:
                q = queues[dst]
                if u in q:
                    q.update(u, q.gain[u] - 2 * w)
        overload = _overload_of(bw[a], bounds[a]) + _overload_of(bw[b], bounds[b])
        score = (overload, cut_delta)
        if score < best:
            best = score
            best_idx = len(log)
            since_best = 0
        else:
            since_best += 1
            if since_best >= limit:
                break
    _rollback(partition, log, best_idx)
    return Delta(log, -best[1])


def _best_target(adj, block_of, v, rng):
    """Return ``(gain, block)`` of the best move of ``v``, or ``None`` if interior."""
    own = block_of[v]
    conn = {}
    internal = 0
    for u, w in adj[v]:
        bu = block_of[u]
        if bu == own:
            internal += w
        else:
            conn[bu] = conn.get(bu, 0) + w
    if not conn:
        return None
    best = max(conn.values())
    targets = [blk for blk, c in conn.items() if c == best]
    target = targets[0] if len(targets) == 1 else targets[rng.randrange(len(targets))]
    return best - internal, target


def _kway_search(graph: Graph, partition: Partition, seeds, rng, alpha: float,
                 stall_steps: int | None = None, touched: set | None = None) -> Delta:
    """One k-way FM pass from ``seeds`` with a single queue.

    ``touched`` is shared between the searches of a multi-try round: nodes
    touched by an earlier search are neither queued nor moved.
    """
    block_of = partition.block_of
    bw = partition.block_weights
    bounds = partition.bounds
    adj = graph.adj
    vwgt = graph.vwgt
    if touched is None:
        touched = set()
    pq = GainPQ(rng)
    target_of = {}
    for v in seeds:
        if v in touched:
            continue
        bt = _best_target(adj, block_of, v, rng)
        if bt is None:
            continue
        touched.add(v)
        target_of[v] = bt[1]
        pq.push(v, bt[0])
    if not pq:
        return Delta()

    rule = StoppingRule(alpha, graph.n)
    moved = set()
    log = []
    cut_delta = 0
    overload = sum(_overload_of(w, bnd) for w, bnd in zip(bw, bounds))
    best = (overload, 0)
    best_idx = 0
    since_best = 0
    while pq:
        v, g = pq.pop()
        src = block_of[v]
        dst = target_of.pop(v)
        if not _move_allowed(bw, bounds, src, dst, vwgt[v]):
            continue
        before = _overload_of(bw[src], bounds[src]) + _overload_of(bw[dst], bounds[dst])
        partition.move(v, dst)
        moved.add(v)
        log.append((v, src, dst))
        cut_delta -= g
        overload += _overload_of(bw[src], bounds[src]) + _overload_of(bw[dst], bounds[dst]) - before
        score = (overload, cut_delta)
        if score < best:
            best = score
            best_idx = len(log)
            since_best = 0
            rule.reset()
        else:
            since_best += 1
            rule.push(g)
            if stall_steps is not None:
                if since_best >= stall_steps:
                    break
            elif rule.should_stop():
                break
        for u, _ in adj[v]:
            if u in moved:
                continue
            if u in pq:
                bt = _best_target(adj, block_of, u, rng)
                if bt is None:
                    pq.remove(u)
                    target_of.pop(u, None)
                else:
                    target_of[u] = bt[1]
                    pq.update(u, bt[0])
            elif u not in touched:
                bt = _best_target(adj, block_of, u, rng)
                if bt is not None:
                    touched.add(u)
                    target_of[u] = bt[1]
                    pq.push(u, bt[0])
    _rollback(partition, log, best_idx)
    return Delta(log, -best[1])


def k_way_fm(graph: Graph, partition: Partition, rng, init_nodes=None, alpha: float = 10,
             max_rounds: int = 10, stall_steps: int | None = None,
             stop_on_no_improvement: bool = True) -> Delta:
    """Repeated k-way FM passes.

    ``init_nodes=None`` seeds every pass with the complete current boundary.
    A pass that does not improve ends the loop.
    """
    total = Delta()
    for _ in range(max_rounds):
        if init_nodes is None:
            seeds = [v for v in range(graph.n) if is_boundary(graph, partition.block_of, v)]
        else:
            seeds = [v for v in init_nodes if is_boundary(graph, partition.block_of, v)]
        if not seeds:
            break
        rng.shuffle(seeds)
        d = _kway_search(graph, partition, seeds, rng, alpha, stall_steps)
        total.extend(d)
        if not d.changed and stop_on_no_improvement:
            break
    return total


def multi_try_fm(graph: Graph, partition: Partition, todo_nodes, rng, alpha: float = 10,
                 max_rounds: int = 10) -> Delta:
    """Localized k-way searches seeded from single boundary nodes.

    Each round shuffles ``todo_nodes`` and starts a search from every node
    not yet touched in that round, seeded with the node and its untouched
    boundary neighbors.
    """
    block_of = partition.block_of
    adj = graph.adj
    total = Delta()
    total.stats["touched_per_round"] = []
    for _ in range(max_rounds):
        todo = [v for v in todo_nodes if is_boundary(graph, block_of, v)]
        if not todo:
            break
        rng.shuffle(todo)
        touched = set()
        round_gain = 0
        searches = 0
        while todo:
            i = rng.randrange(len(todo))
            v = todo[i]
            todo[i] = todo[-1]
            todo.pop()
            if v in touched or not is_boundary(graph, block_of, v):
                continue
            seeds = [v] + [u for u, _ in adj[v]
                           if u not in touched and is_boundary(graph, block_of, u)]
            d = _kway_search(graph, partition, seeds, rng, alpha, touched=touched)
            searches += 1
            total.extend(d)
            round_gain += d.gain
        total.stats["touched_per_round"].append(len(touched))
        total.stats.setdefault("searches", 0)
        total.stats["searches"] += searches
        if round_gain <= 0:
            break
    return total


def rebalance(graph: Graph, partition: Partition, rng, max_moves: int | None = None) -> Delta:
    """Greedily move nodes out of overloaded blocks.

    Boundary nodes are preferred, picking the move with the best gain into a
    block that stays within its bound. Stops when feasible or stuck.
    """
    block_of = partition.block_of
    bw = partition.block_weights
    bounds = partition.bounds
    adj = graph.adj
    vwgt = graph.vwgt
    log = []
    gain_total = 0
    limit = max_moves if max_moves is not None else 4 * graph.n + 10
    while len(log) < limit:
        over = [i for i in range(partition.k) if bw[i] > bounds[i]]
        if not over:
            break
        src = max(over, key=lambda i: bw[i] - bounds[i])
        best = None
        for v in range(graph.n):
            if block_of[v] != src:
                continue
            w = vwgt[v]
            conn = {}
            internal = 0
            for u, ew in adj[v]:
                bu = block_of[u]
                if bu == src:
                    internal += ew
                else:
                    conn[bu] = conn.get(bu, 0) + ew
            for dst in range(partition.k):
                if dst == src or bw[dst] + w > bounds[dst]:
                    continue
                # prefer moves that keep the target in bounds, then by gain, then lighter nodes
                key = (conn.get(dst, 0) - internal, -w, rng.random())
                if best is None or key > best[0]:
                    best = (key, v, dst)
        if best is None:
            # no move fits anywhere: push the lightest node to the lightest block
            dst = min(range(partition.k), key=lambda i: bw[i])
            cands = [v for v in range(graph.n) if block_of[v] == src]
            if not cands or dst == src:
                break
            v = min(cands, key=lambda x: vwgt[x])
            if bw[dst] + vwgt[v] >= bw[src]:
                break
            g = gain(graph, partition, v, dst)
        else:
            _, v, dst = best
            g = best[0][0]
        partition.move(v, dst)
        log.append((v, src, dst))
        gain_total += g
    return Delta(log, gain_total)
