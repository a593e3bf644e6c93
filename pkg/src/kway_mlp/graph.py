"""Weighted undirected graphs, partitions and contraction.

Graphs are stored in compressed adjacency form (``xadj``/``adjncy``/``adjwgt``)
and never mutated; coarsening produces a new graph per level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

Weight = int


class InvalidPartitionError(ValueError):
    pass


class Graph:
    """Static undirected graph with node and edge weights.

    Every undirected edge {u, v} appears twice in the adjacency arrays,
    once in the row of ``u`` and once in the row of ``v``.
    """

    __slots__ = ("xadj", "adjncy", "adjwgt", "vwgt", "merged_parallel",
                 "dropped_self_loops", "_adj", "_total_node_weight")

    def __init__(self, xadj, adjncy, adjwgt, vwgt):
        self.xadj = list(xadj)
        self.adjncy = list(adjncy)
        self.adjwgt = list(adjwgt)
        self.vwgt = list(vwgt)
        self.merged_parallel = 0
        self.dropped_self_loops = 0
        self._adj = None
        self._total_node_weight = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence], node_weights=None) -> "Graph":
        """Build a graph from ``(u, v)`` or ``(u, v, w)`` tuples.

        Self-loops are dropped and parallel edges merged by adding their
        weights; both are counted on the returned graph.
        """
        rows = [dict() for _ in range(n)]
        self_loops = 0
        parallel = 0
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = e[2] if len(e) > 2 else 1
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if w < 0:
                raise ValueError(f"negative edge weight on ({u}, {v})")
            if u == v:
                self_loops += 1
                continue
            if v in rows[u]:
                parallel += 1
                rows[u][v] += w
                rows[v][u] += w
            else:
                rows[u][v] = w
                rows[v][u] = w
        g = cls._from_rows(rows, node_weights if node_weights is not None else [1] * n)
        g.merged_parallel = parallel
        g.dropped_self_loops = self_loops
        return g

    @classmethod
    def _from_rows(cls, rows, vwgt) -> "Graph":
        xadj = [0]
        adjncy = []
        adjwgt = []
        for row in rows:
            for u in sorted(row):
                adjncy.append(u)
                adjwgt.append(row[u])
            xadj.append(len(adjncy))
        return cls(xadj, adjncy, adjwgt, vwgt)

    @property
    def n(self) -> int:
        return len(self.vwgt)

    @property
    def m(self) -> int:
        return len(self.adjncy) // 2

    @property
    def adj(self) -> list:
        """Per-node list of ``(neighbor, weight)`` pairs (built lazily, cached)."""
        if self._adj is None:
            xadj, adjncy, adjwgt = self.xadj, self.adjncy, self.adjwgt
            self._adj = [list(zip(adjncy[xadj[v]:xadj[v + 1]], adjwgt[xadj[v]:xadj[v + 1]]))
                         for v in range(self.n)]
        return self._adj

    def neighbors(self, v: int) -> list:
        return self.adjncy[self.xadj[v]:self.xadj[v + 1]]

    def degree(self, v: int) -> int:
        return self.xadj[v + 1] - self.xadj[v]

    def weighted_degree(self, v: int) -> Weight:
        return sum(self.adjwgt[self.xadj[v]:self.xadj[v + 1]])

    def edges(self):
        """Yield each undirected edge once as ``(u, v, w)`` with ``u < v``."""
        xadj, adjncy, adjwgt = self.xadj, self.adjncy, self.adjwgt
        for u in range(self.n):
            for i in range(xadj[u], xadj[u + 1]):
                v = adjncy[i]
                if u < v:
                    yield u, v, adjwgt[i]

    def total_node_weight(self) -> Weight:
        if self._total_node_weight is None:
            self._total_node_weight = sum(self.vwgt)
        return self._total_node_weight

    def total_edge_weight(self) -> Weight:
        total = sum(self.adjwgt)
        return total // 2 if isinstance(total, int) else total / 2

    def max_node_weight(self) -> Weight:
        return max(self.vwgt) if self.vwgt else 0

    def check(self) -> None:
        """Raise ``ValueError`` if symmetry or simplicity is violated."""
        seen = {}
        for u in range(self.n):
            row = set()
            for v, w in self.adj[u]:
                if v == u:
                    raise ValueError(f"self-loop at {u}")
                if v in row:
                    raise ValueError(f"parallel edge ({u}, {v})")
                row.add(v)
                seen[(u, v)] = w
        for (u, v), w in seen.items():
            if seen.get((v, u)) != w:
                raise ValueError(f"asymmetric edge ({u}, {v})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.xadj == other.xadj and self.adjncy == other.adjncy
                and self.adjwgt == other.adjwgt and self.vwgt == other.vwgt)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def compute_l_max(total_weight, k: int, epsilon: float, max_node_weight):
    """Upper bound on block weight: (1+eps) * c(V)/k + max_v c(v)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return (1 + epsilon) * total_weight / k + max_node_weight


class Partition:
    """Block assignment with cached block weights.

    ``l_max`` is fixed at construction and defaults to the bound of ``graph``
    itself. Coarse levels of a hierarchy pass the input graph's bound down so
    that a partition feasible on a coarse level stays feasible after
    projection. ``bounds`` holds one weight limit per block; it defaults to
    ``l_max`` everywhere but recursive bisection uses asymmetric limits.
    """

    __slots__ = ("graph", "block_of", "k", "epsilon", "block_weights", "l_max", "bounds")

    def __init__(self, graph: Graph, block_of, k: int, epsilon: float, l_max=None, bounds=None):
        if len(block_of) != graph.n:
            raise InvalidPartitionError(
                f"partition covers {len(block_of)} nodes, graph has {graph.n}")
        self.graph = graph
        self.block_of = list(block_of)
        self.k = k
        self.epsilon = epsilon
        weights = [0] * k
        vwgt = graph.vwgt
        for v, b in enumerate(self.block_of):
            if not 0 <= b < k:
                raise InvalidPartitionError(f"node {v} has block {b}, k={k}")
            weights[b] += vwgt[v]
        self.block_weights = weights
        if l_max is None:
            l_max = compute_l_max(graph.total_node_weight(), k, epsilon, graph.max_node_weight())
        self.l_max = l_max
        self.bounds = list(bounds) if bounds is not None else [self.l_max] * k

    def move(self, v: int, to: int) -> None:
        w = self.graph.vwgt[v]
        self.block_weights[self.block_of[v]] -= w
        self.block_weights[to] += w
        self.block_of[v] = to

    def copy(self) -> "Partition":
        p = Partition.__new__(Partition)
        p.graph = self.graph
        p.block_of = self.block_of[:]
        p.k = self.k
        p.epsilon = self.epsilon
        p.block_weights = self.block_weights[:]
        p.l_max = self.l_max
        p.bounds = self.bounds[:]
        return p

    def assign_from(self, other: "Partition") -> None:
        self.block_of[:] = other.block_of
        self.block_weights[:] = other.block_weights

    def is_feasible(self) -> bool:
        return all(w <= b for w, b in zip(self.block_weights, self.bounds))

    def overload(self):
        return sum(max(0, w - b) for w, b in zip(self.block_weights, self.bounds))

    def balance(self) -> float:
        """Heaviest block relative to a perfectly balanced block."""
        avg = self.graph.total_node_weight() / self.k
        return max(self.block_weights) / avg if avg > 0 else 1.0

    def recompute_weights(self) -> list:
        weights = [0] * self.k
        for v, b in enumerate(self.block_of):
            weights[b] += self.graph.vwgt[v]
        return weights


def edge_cut(graph: Graph, partition) -> Weight:
    """Total weight of edges whose endpoints lie in different blocks."""
    block_of = partition.block_of if isinstance(partition, Partition) else partition
    k = partition.k if isinstance(partition, Partition) else None
    if len(block_of) != graph.n:
        raise InvalidPartitionError("partition does not cover the graph")
    if k is not None:
        for v, b in enumerate(block_of):
            if not 0 <= b < k:
                raise InvalidPartitionError(f"node {v} has block {b}, k={k}")
    xadj, adjncy, adjwgt = graph.xadj, graph.adjncy, graph.adjwgt
    cut = 0
    for u in range(graph.n):
        bu = block_of[u]
        for i in range(xadj[u], xadj[u + 1]):
            if block_of[adjncy[i]] != bu:
                cut += adjwgt[i]
    return cut // 2 if isinstance(cut, int) else cut / 2


# --- matchings and contraction ------------------------------------------------

def matching_from_pairs(n: int, pairs) -> list:
    """Partner array (``-1`` = unmatched) from a list of node pairs."""
    partner = [-1] * n
    for u, v in pairs:
        if partner[u] != -1 or partner[v] != -1 or u == v:
            raise ValueError(f"({u}, {v}) conflicts with the matching")
        partner[u] = v
        partner[v] = u
    return partner


def is_valid_matching(graph: Graph, partner) -> bool:
    for u, v in enumerate(partner):
        if v == -1:
            continue
        if partner[v] != u or v == u or v not in graph.neighbors(u):
            return False
    return True


def matching_pairs(partner) -> list:
    return [(u, v) for u, v in enumerate(partner) if v > u]


def contract(graph: Graph, partner) -> tuple:
    """Contract every matched pair into one node.

    Returns ``(coarse_graph, mapping)`` where ``mapping[v]`` is the coarse
    node representing fine node ``v``. Edges that become parallel are merged
    by adding their weights; edges inside a pair disappear.
    """
    n = graph.n
    mapping = [-1] * n
    members = []
    for v in range(n):
        if mapping[v] != -1:
            continue
        mapping[v] = len(members)
        u = partner[v]
        if u != -1:
            mapping[u] = len(members)
            members.append((v, u))
        else:
            members.append((v,))
    vwgt = graph.vwgt
    adj = graph.adj
    coarse_vwgt = []
    xadj = [0]
    adjncy = []
    adjwgt = []
    for x, group in enumerate(members):
        row = {}
        cw = 0
        for v in group:
            cw += vwgt[v]
            for u, w in adj[v]:
                y = mapping[u]
                if y != x:
                    row[y] = row.get(y, 0) + w
        coarse_vwgt.append(cw)
        for y in sorted(row):
            adjncy.append(y)
            adjwgt.append(row[y])
        xadj.append(len(adjncy))
    return Graph(xadj, adjncy, adjwgt, coarse_vwgt), mapping


def project_partition(fine_graph: Graph, mapping, coarse_partition: Partition) -> Partition:
    """Give every fine node the block of its coarse representative."""
    cb = coarse_partition.block_of
    return Partition(fine_graph, [cb[x] for x in mapping], coarse_partition.k,
                     coarse_partition.epsilon, coarse_partition.l_max, coarse_partition.bounds)


def restrict_partition(coarse_graph: Graph, mapping, fine_partition: Partition) -> Partition:
    """Carry a fine partition to a coarse level whose nodes never straddle blocks."""
    block_of = [-1] * coarse_graph.n
    fb = fine_partition.block_of
    for v, x in enumerate(mapping):
        if block_of[x] == -1:
            block_of[x] = fb[v]
        elif block_of[x] != fb[v]:
            raise InvalidPartitionError(f"coarse node {x} spans blocks")
    return Partition(coarse_graph, block_of, fine_partition.k, fine_partition.epsilon,
                     fine_partition.l_max, fine_partition.bounds)


# --- quotient graph and boundaries --------------------------------------------

@dataclass
class QuotientGraph:
    k: int
    edges: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return self.k

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def total_weight(self):
        return sum(self.edges.values())


def build_quotient_graph(graph: Graph, partition: Partition) -> QuotientGraph:
    """Block adjacency annotated with the total crossing edge weight per pair."""
    block_of = partition.block_of
    edges = {}
    for u, v, w in graph.edges():
        a, b = block_of[u], block_of[v]
        if a != b:
            key = (a, b) if a < b else (b, a)
            edges[key] = edges.get(key, 0) + w
    return QuotientGraph(partition.k, edges)


def boundary_nodes(graph: Graph, partition: Partition, pair) -> tuple:
    """Nodes of ``pair[0]`` adjacent to ``pair[1]`` and vice versa."""
    a, b = pair
    if a == b:
        raise ValueError("pair blocks must differ")
    block_of = partition.block_of
    adj = graph.adj
    left, right = set(), set()
    for v, bv in enumerate(block_of):
        if bv == a:
            other, side = b, left
        elif bv == b:
            other, side = a, right
        else:
            continue
        for u, _ in adj[v]:
            if block_of[u] == other:
                side.add(v)
                break
    return left, right


def is_boundary(graph: Graph, block_of, v: int) -> bool:
    bv = block_of[v]
    for u, _ in graph.adj[v]:
        if block_of[u] != bv:
            return True
    return False


def all_boundary_nodes(graph: Graph, partition: Partition) -> list:
    block_of = partition.block_of
    return [v for v in range(graph.n) if is_boundary(graph, block_of, v)]
