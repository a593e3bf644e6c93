"""Max-flow min-cut refinement of a block pair.

A corridor around the cut between two blocks is turned into an s-t network
whose every minimum cut keeps both blocks within their weight bound. The
residual graph of a maximum flow encodes all minimum cuts; sweeping random
topological orders of its SCC condensation yields better balanced ones.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .fm import Delta
from .graph import Graph, Partition


# --- flow networks ------------------------------------------------------------

class FlowNetwork:
    """Directed network; arc ``i ^ 1`` is the reverse of arc ``i``."""

    def __init__(self, n: int):
        self.n = n
        self.adj = [[] for _ in range(n)]
        self.to = []
        self.cap = []

    def add_edge(self, u: int, v: int, cap, rev_cap=0) -> int:
        arc = len(self.to)
        self.to.append(v)
        self.cap.append(cap)
        self.adj[u].append(arc)
        self.to.append(u)
        self.cap.append(rev_cap)
        self.adj[v].append(arc + 1)
        return arc

    def cut_capacity(self, source_side) -> int:
        total = 0
        for u in source_side:
            for a in self.adj[u]:
                if self.to[a] not in source_side:
                    total += self.cap[a]
        return total


@dataclass
class ResidualGraph:
    network: FlowNetwork
    residual: list
    source: int
    sink: int
    flow_value: int

    def arcs(self, u: int):
        res, to = self.residual, self.network.to
        for a in self.network.adj[u]:
            if res[a] > 0:
                yield to[a]

    def flow_on(self, arc: int):
        return self.network.cap[arc] - self.residual[arc]


def max_flow(network: FlowNetwork, s: int, t: int) -> tuple:
    """Highest-label push-relabel with gap heuristic.

    Runs until no node besides ``s`` and ``t`` holds excess, so the result is
    a proper flow (not just a preflow) and its residual graph can be used for
    cut enumeration. Returns ``(value, ResidualGraph)``.
    """
    n = network.n
    to = network.to
    adj = network.adj
    res = network.cap[:]
    excess = [0] * n
    cur = [0] * n
    limit = 2 * n + 1

    # exact distance labels towards t
    height = [n] * n
    height[t] = 0
    queue = deque([t])
    while queue:
        v = queue.popleft()
        for a in adj[v]:
            u = to[a]
            if height[u] == n and u != t and res[a ^ 1] > 0:
                height[u] = height[v] + 1
                queue.append(u)
    height[s] = n
    count = [0] * (limit + 1)
    for v in range(n):
        count[height[v]] += 1

    buckets = [[] for _ in range(limit + 1)]
    highest = 0
    for a in adj[s]:
        c = res[a]
        if c > 0:
            v = to[a]
            res[a] = 0
            res[a ^ 1] += c
            excess[v] += c
            excess[s] -= c
            if v != t and v != s and excess[v] == c:
                buckets[height[v]].append(v)
                if height[v] > highest:
                    highest = height[v]

    while highest >= 0:
        bucket = buckets[highest]
        if not bucket:
            highest -= 1
            continue
        u = bucket.pop()
        if height[u] != highest or excess[u] <= 0:
            continue
        # discharge u
        arcs = adj[u]
        while excess[u] > 0:
            if cur[u] == len(arcs):
                old = height[u]
                new = limit
                for a in arcs:
                    if res[a] > 0 and height[to[a]] + 1 < new:
                        new = height[to[a]] + 1
                count[old] -= 1
                height[u] = new
                count[new] += 1
                cur[u] = 0
                if count[old] == 0 and old < n:
                    # gap: nodes above it can no longer reach t
                    for v in range(n):
                        if old < height[v] < n and v != s:
                            count[height[v]] -= 1
                            height[v] = n + 1
                            count[n + 1] += 1
                            cur[v] = 0
                            if excess[v] > 0 and v != t:
                                buckets[n + 1].append(v)
                                if n + 1 > highest:
                                    highest = n + 1
                    if height[u] < n + 1:
                        count[height[u]] -= 1
                        height[u] = n + 1
                        count[n + 1] += 1
                break
            a = arcs[cur[u]]
            v = to[a]
            if res[a] > 0 and height[u] == height[v] + 1:
                delta = excess[u] if excess[u] < res[a] else res[a]
                res[a] -= delta
                res[a ^ 1] += delta
                excess[u] -= delta
                was_idle = excess[v] == 0
                excess[v] += delta
                if was_idle and v != s and v != t:
                    buckets[height[v]].append(v)
            else:
                cur[u] += 1
        if excess[u] > 0:
            h = height[u]
            buckets[h].append(u)
            if h > highest:
                highest = h
    return excess[t], ResidualGraph(network, res, s, t, excess[t])


def _reachable(start, step) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in step(v):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


def extract_min_cut(residual: ResidualGraph) -> tuple:
    """Source side reachable from ``s`` in the residual graph, and the cut value."""
    return _reachable(residual.source, residual.arcs), residual.flow_value


def strongly_connected_components(n: int, succ) -> list:
    """Iterative Tarjan. ``succ(v)`` yields successors; returns a component id per node."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if index[u] == -1:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack[u] = True
                    work.append((u, iter(succ(u))))
                    advanced = True
                    break
                if on_stack[u] and index[u] < low[v]:
                    low[v] = index[u]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


@dataclass
class MinCutDAG:
    """SCC condensation of a residual graph with source and sink parts absorbed.

    ``source_nodes`` holds everything reachable from ``s`` and ``sink_nodes``
    everything that reaches ``t``. The remaining components form a DAG in
    which every successor-closed set, together with ``source_nodes``, is the
    source side of a minimum cut.
    """

    source_nodes: set
    sink_nodes: set
    components: list
    succ: list
    flow_value: int = 0

    def source_side(self, chosen) -> set:
        side = set(self.source_nodes)
        for c in chosen:
            side.update(self.components[c])
        return side


def build_min_cut_dag(residual: ResidualGraph) -> MinCutDAG:
    net = residual.network
    n = net.n
    res, to = residual.residual, net.to
    source_nodes = _reachable(residual.source, residual.arcs)

    def preds(v):
        for a in net.adj[v]:
            if res[a ^ 1] > 0:
                yield to[a]

    sink_nodes = _reachable(residual.sink, preds)
    comp = strongly_connected_components(n, lambda v: list(residual.arcs(v)))
    ids = {}
    members = []
    for v in range(n):
        if v in source_nodes or v in sink_nodes:
            continue
        c = comp[v]
        if c not in ids:
            ids[c] = len(members)
            members.append([])
        members[ids[c]].append(v)
    succ = [set() for _ in members]
    for c, nodes in enumerate(members):
        for v in nodes:
            for u in residual.arcs(v):
                d = ids.get(comp[u])
                if d is not None and d != c:
                    succ[c].add(d)
    return MinCutDAG(source_nodes, sink_nodes, members, succ, residual.flow_value)


def closed_sets(dag: MinCutDAG):
    """Every successor-closed set of DAG components (exponential; for checks only)."""
    m = len(dag.components)
    for mask in range(1 << m):
        ok = True
        for c in range(m):
            if mask >> c & 1:
                for d in dag.succ[c]:
                    if not mask >> d & 1:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            yield [c for c in range(m) if mask >> c & 1]


def random_topological_order(dag: MinCutDAG, rng) -> list:
    """Reverse postorder of a DFS with shuffled roots and children."""
    m = len(dag.components)
    seen = [False] * m
    post = []
    roots = list(range(m))
    rng.shuffle(roots)
    for r in roots:
        if seen[r]:
            continue
        seen[r] = True
        children = list(dag.succ[r])
        rng.shuffle(children)
        work = [(r, iter(children))]
        while work:
            v, it = work[-1]
            for u in it:
                if not seen[u]:
                    seen[u] = True
                    kids = list(dag.succ[u])
                    rng.shuffle(kids)
                    work.append((u, iter(kids)))
                    break
            else:
                work.pop()
                post.append(v)
    post.reverse()
    return post


def most_balanced_cut(dag: MinCutDAG, node_weight, fixed_left, fixed_right,
                      repetitions: int, rng, bound=None) -> tuple:
    """Search minimum cuts for the one with the lightest heavier side.

    ``node_weight[v]`` is the graph weight carried by network node ``v``;
    source-side nodes join the left block. Every prefix of a random
    topological order is moved to the sink side in turn, over
    ``repetitions`` orders. Returns ``(source_side, (max_weight, imbalance),
    feasible)`` where feasibility is judged against ``bound``.
    """
    comp_weight = [sum(node_weight[v] for v in nodes) for nodes in dag.components]
    base_left = fixed_left + sum(node_weight[v] for v in dag.source_nodes)
    base_right = fixed_right + sum(node_weight[v] for v in dag.sink_nodes)
    all_free = sum(comp_weight)

    def key(left, right):
        return (max(left, right), abs(left - right))

    best_key = None
    best_prefix = None
    best_order = None
    for _ in range(max(1, repetitions)):
        order = random_topological_order(dag, rng)
        left = base_left + all_free
        right = base_right
        k = key(left, right)
        if best_key is None or k < best_key:
            best_key, best_prefix, best_order = k, 0, order
        for i, c in enumerate(order):
            left -= comp_weight[c]
            right += comp_weight[c]
            k = key(left, right)
            if k < best_key:
                best_key, best_prefix, best_order = k, i + 1, order
    moved = set(best_order[:best_prefix])
    side = dag.source_side(c for c in range(len(dag.components)) if c not in moved)
    feasible = bound is None or best_key[0] <= bound
    return side, best_key, feasible


# --- corridor refinement --------------------------------------------------------

@dataclass
class Corridor:
    nodes: list = field(default_factory=list)
    left_border: set = field(default_factory=set)
    right_border: set = field(default_factory=set)
    left_weight: int = 0
    right_weight: int = 0


def build_corridor(graph: Graph, partition: Partition, pair, epsilon_active: float) -> Corridor:
    """Two BFS from the pair's boundary, each confined to its own block.

    A BFS stops as soon as the next node would push its area past
    ``(1 + eps') c(V)/k - w(other block)``. Boundary nodes are always
    included.
    """
    a, b = pair
    block_of = partition.block_of
    adj = graph.adj
    vwgt = graph.vwgt
    avg = graph.total_node_weight() / partition.k
    left_seeds, right_seeds = [], []
    for v, bv in enumerate(block_of):
        if bv != a and bv != b:
            continue
        other = b if bv == a else a
        for u, _ in adj[v]:
            if block_of[u] == other:
                (left_seeds if bv == a else right_seeds).append(v)
                break
    corridor = Corridor()
    if not left_seeds:
        return corridor
    in_corridor = set()

    def grow(seeds, own, budget):
        weight = 0
        queue = deque()
        for v in seeds:
            in_corridor.add(v)
            weight += vwgt[v]
            queue.append(v)
        while queue:
            v = queue.popleft()
            for u, _ in adj[v]:
                if u in in_corridor or block_of[u] != own:
                    continue
                if weight + vwgt[u] > budget:
                    return weight
                in_corridor.add(u)
                weight += vwgt[u]
                queue.append(u)
        return weight

    bw = partition.block_weights
    corridor.left_weight = grow(left_seeds, a, (1 + epsilon_active) * avg - bw[b])
    corridor.right_weight = grow(right_seeds, b, (1 + epsilon_active) * avg - bw[a])
    corridor.nodes = sorted(in_corridor)
    for v in corridor.nodes:
        for u, _ in adj[v]:
            if u not in in_corridor:
                (corridor.left_border if block_of[v] == a else corridor.right_border).add(v)
                break
    return corridor


def build_flow_network(graph: Graph, partition: Partition, corridor: Corridor) -> tuple:
    """Network on the corridor plus ``s``/``t``; returns ``(network, s, t, local_ids)``.

    Corridor edges become two opposite arcs of the edge weight; ``s`` feeds
    the left border and the right border drains into ``t`` through arcs of
    a capacity larger than every finite cut.
    """
    local = {v: i for i, v in enumerate(corridor.nodes)}
    size = len(corridor.nodes)
    s, t = size, size + 1
    net = FlowNetwork(size + 2)
    total = 0
    for v in corridor.nodes:
        lv = local[v]
        for u, w in graph.adj[v]:
            lu = local.get(u)
            if lu is not None and lv < lu:
                net.add_edge(lv, lu, w, w)
                total += w
    inf = total + 1
    for v in corridor.left_border:
        net.add_edge(s, local[v], inf)
    for v in corridor.right_border:
        net.add_edge(local[v], t, inf)
    return net, s, t, local


def adaptive_flow_iterations(graph: Graph, partition: Partition, pair, rng,
                             alpha_prime: float = 8, max_iterations: int = 10,
                             most_balanced: bool = True, repetitions: int = 5,
                             accept_equal_cut: bool = False, alpha_start: float | None = None) -> Delta:
    """Repeated corridor flow refinement with a self-adjusting corridor size.

    The corridor is built for ``alpha * eps`` with ``alpha`` starting at
    ``alpha_start`` (default ``alpha_prime``). A feasible, strictly smaller
    cut is applied and doubles ``alpha`` (capped at ``alpha_prime``); an
    infeasible one halves it (floored at 1). A feasible cut without
    improvement ends the loop. With ``accept_equal_cut`` an equal cut that
    is strictly better balanced is also applied.
    """
    a, b = pair
    block_of = partition.block_of
    bw = partition.block_weights
    bounds = partition.bounds
    vwgt = graph.vwgt
    adj = graph.adj
    alpha = float(alpha_prime if alpha_start is None else alpha_start)
    alpha = min(max(alpha, 1.0), max(float(alpha_prime), 1.0))
    total = Delta()
    history = []
    for _ in range(max_iterations):
        corridor = build_corridor(graph, partition, pair, alpha * partition.epsilon)
        if not corridor.nodes:
            break
        net, s, t, local = build_flow_network(graph, partition, corridor)
        value, residual = max_flow(net, s, t)
        pair_cut = 0
        for v in corridor.nodes:
            if block_of[v] == a:
                for u, w in adj[v]:
                    if block_of[u] == b:
                        pair_cut += w
        corridor_left = sum(vwgt[v] for v in corridor.nodes if block_of[v] == a)
        corridor_right = sum(vwgt[v] for v in corridor.nodes if block_of[v] == b)
        fixed_left = bw[a] - corridor_left
        fixed_right = bw[b] - corridor_right
        if most_balanced:
            node_weight = [vwgt[v] for v in corridor.nodes] + [0, 0]
            dag = build_min_cut_dag(residual)
            side, _, _ = most_balanced_cut(dag, node_weight, fixed_left, fixed_right,
                                           repetitions, rng, min(bounds[a], bounds[b]))
        else:
            side, _ = extract_min_cut(residual)
        new_left = fixed_left + sum(vwgt[v] for v in corridor.nodes if local[v] in side)
        new_right = bw[a] + bw[b] - new_left
        feasible = new_left <= bounds[a] and new_right <= bounds[b]
        improved = value < pair_cut
        if not improved and accept_equal_cut and value == pair_cut:
            improved = max(new_left, new_right) < max(bw[a], bw[b])
        history.append((alpha, pair_cut - value, feasible))
        if feasible and improved:
            moves = []
            for v in corridor.nodes:
                dst = a if local[v] in side else b
                src = block_of[v]
                if dst != src:
                    partition.move(v, dst)
                    moves.append((v, src, dst))
            total.moves.extend(moves)
            total.gain += pair_cut - value
            alpha = min(2 * alpha, alpha_prime)
            continue
        if feasible:
            break
        if alpha <= 1:
            break
        alpha = max(alpha / 2, 1.0)
    total.stats["history"] = history
    return total
