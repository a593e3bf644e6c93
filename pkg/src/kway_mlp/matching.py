"""Edge ratings and matching algorithms used during coarsening."""

from __future__ import annotations

import math

from .graph import Graph

EXPANSION2 = "expansion2"
INNER_OUTER = "inner_outer"
WEIGHT = "weight"
RANDOM = "random"
RATINGS = (EXPANSION2, INNER_OUTER, WEIGHT, RANDOM)


def rate_edge(graph: Graph, u: int, v: int, w, rating: str, out=None, rng=None) -> float:
    """Score of contracting edge ``{u, v}`` with weight ``w``.

    ``out`` optionally caches weighted degrees for ``inner_outer``. A zero
    ``inner_outer`` denominator means the pair has no other neighbors and is
    rated ``inf``.
    """
    if rating == EXPANSION2:
        cu, cv = graph.vwgt[u], graph.vwgt[v]
        if cu == 0 or cv == 0:
            return math.inf
        return w * w / (cu * cv)
    if rating == INNER_OUTER:
        ou = out[u] if out is not None else graph.weighted_degree(u)
        ov = out[v] if out is not None else graph.weighted_degree(v)
        denom = ou + ov - 2 * w
        if denom <= 0:
            return math.inf
        return w / denom
    if rating == WEIGHT:
        return float(w)
    if rating == RANDOM:
        return rng.random()
    raise ValueError(f"unknown rating {rating!r}")


def rate_edges(graph: Graph, rating: str, rng=None) -> list:
    """List of ``(score, u, v)`` for every undirected edge."""
    out = [graph.weighted_degree(v) for v in range(graph.n)] if rating == INNER_OUTER else None
    return [(rate_edge(graph, u, v, w, rating, out, rng), u, v) for u, v, w in graph.edges()]


def _sorted_edges(rated, rng) -> list:
    # shuffle first so equal ratings end up in random order after the stable sort
    edges = list(rated)
    if rng is not None:
        rng.shuffle(edges)
    edges.sort(key=lambda e: e[0], reverse=True)
    return edges


def optimal_path_matching(scores, cycle: bool = False) -> tuple:
    """Maximum-score set of pairwise non-adjacent edges on a path or even cycle.

    ``scores[i]`` is the score of the i-th edge along the path. Returns
    ``(total, chosen_indices)``.
    """
    m = len(scores)
    if cycle:
        if m % 2:
            raise ValueError("odd cycle passed to path matching")
        if m == 0:
            return 0, []
        # edges 0 and m-1 are adjacent, so at least one of them is unused
        t1, c1 = _path_dp(scores, 1, m)
        t2, c2 = _path_dp(scores, 0, m - 1)
        return (t1, c1) if t1 >= t2 else (t2, c2)
    return _path_dp(scores, 0, m)


def _path_dp(scores, lo: int, hi: int) -> tuple:
    # best[i]: optimum over edges lo..i-1
    size = hi - lo
    if size <= 0:
        return 0, []
    best = [0] * (size + 1)
    take = [False] * (size + 1)
    best[1] = max(scores[lo], 0)
    take[1] = scores[lo] > 0
    for i in range(2, size + 1):
        with_edge = best[i - 2] + scores[lo + i - 1]
        if with_edge > best[i - 1]:
            best[i] = with_edge
            take[i] = True
        else:
            best[i] = best[i - 1]
    chosen = []
    i = size
    while i > 0:
        if take[i]:
            chosen.append(lo + i - 1)
            i -= 2
        else:
            i -= 1
    chosen.reverse()
    return best[size], chosen


def gpa_matching(graph: Graph, rated, rng=None, eligible=None) -> list:
    """Global Path Algorithm.

    Scans edges by decreasing rating and keeps those that extend the
    collection of node-disjoint paths and even cycles, then solves each
    path/cycle optimally by dynamic programming. ``eligible(u, v)`` can veto
    edges. Returns a partner array.

    The path collection can drop an edge that plain greedy would use, so the
    greedy matching over the same scan order is computed as well and the
    heavier of the two is returned.
    """
    edges = _sorted_edges(rated, rng)
    paths = _path_collection_matching(graph.n, edges, eligible)
    greedy = _greedy_scan(graph.n, edges, eligible)
    if matching_score(edges, greedy) > matching_score(edges, paths):
        return greedy
    return paths


def _path_collection_matching(n: int, edges, eligible) -> list:
    # collection adjacency: up to two (neighbor, score) entries per node
    links = [[] for _ in range(n)]
    other_end = list(range(n))  # valid for path endpoints only
    length = [0] * n            # path edge count, valid at endpoints
    for score, u, v in edges:
        if len(links[u]) >= 2 or len(links[v]) >= 2:
            continue
        if eligible is not None and not eligible(u, v):
            continue
        if other_end[u] == v:
            # closing a path into a cycle; only even cycles are allowed
            if length[u] % 2 == 0:
                continue
            links[u].append((v, score))
            links[v].append((u, score))
            length[u] += 1
            length[v] = length[u]
            continue
        a, b = other_end[u], other_end[v]
        total = length[u] + length[v] + 1
        links[u].append((v, score))
        links[v].append((u, score))
        other_end[a] = b
        other_end[b] = a
        length[a] = length[b] = total

    partner = [-1] * n
    visited = [False] * n

    def walk(start):
        nodes = [start]
        scores = []
        visited[start] = True
        prev, cur = -1, start
        while True:
            nxt = None
            for x, s in links[cur]:
                if x != prev and not visited[x]:
                    nxt = (x, s)
                    break
            if nxt is None:
                # close the cycle if the last node links back to the start
                closing = None
                if len(nodes) > 2:
                    for x, s in links[cur]:
                        if x == start:
                            closing = s
                return nodes, scores, closing
            prev, cur = cur, nxt[0]
            visited[cur] = True
            nodes.append(cur)
            scores.append(nxt[1])

    def apply(nodes, chosen):
        for i in chosen:
            a = nodes[i]
            b = nodes[(i + 1) % len(nodes)]
            partner[a] = b
            partner[b] = a

    for v in range(n):
        if not visited[v] and len(links[v]) <= 1:
            nodes, scores, _ = walk(v)
            if scores:
                apply(nodes, optimal_path_matching(scores)[1])
    for v in range(n):
        if not visited[v] and links[v]:
            nodes, scores, closing = walk(v)
            scores.append(closing)
            apply(nodes, optimal_path_matching(scores, cycle=True)[1])

    # edges left out of the collection can still join where both ends are free
    for score, u, v in edges:
        if partner[u] == -1 and partner[v] == -1 and score > 0:
            if eligible is None or eligible(u, v):
                partner[u] = v
                partner[v] = u
    return partner


def greedy_matching(graph: Graph, rated, rng=None, eligible=None) -> list:
    """Take edges by decreasing rating whenever both ends are free."""
    return _greedy_scan(graph.n, _sorted_edges(rated, rng), eligible)


def _greedy_scan(n: int, edges, eligible) -> list:
    partner = [-1] * n
    for score, u, v in edges:
        if partner[u] == -1 and partner[v] == -1:
            if eligible is None or eligible(u, v):
                partner[u] = v
                partner[v] = u
    return partner


def random_matching(graph: Graph, rng, eligible=None) -> list:
    """Visit nodes in random order and pair each with a random free neighbor."""
    n = graph.n
    partner = [-1] * n
    order = list(range(n))
    rng.shuffle(order)
    adj = graph.adj
    for v in order:
        if partner[v] != -1:
            continue
        free = [u for u, _ in adj[v] if partner[u] == -1
                and (eligible is None or eligible(v, u))]
        if free:
            u = free[rng.randrange(len(free))]
            partner[v] = u
            partner[u] = v
    return partner


def matching_score(rated, partner) -> float:
    return sum(s for s, u, v in rated if partner[u] == v)
