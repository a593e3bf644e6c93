"""Independent brute-force references used by the tests.

Nothing here imports the package's algorithms; only plain data goes in.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque

import numpy as np


def cut_of(edges, block_of):
    return sum(w for u, v, w in edges if block_of[u] != block_of[v])


def l_max(weights, k, eps):
    return (1 + eps) * sum(weights) / k + max(weights)


def best_bisection(n, edges, eps, weights=None):
    """Minimum cut over all 2-partitions with both sides within L_max (numpy bitmask sweep)."""
    weights = weights or [1] * n
    masks = np.arange(1 << n, dtype=np.int64)
    bound = l_max(weights, 2, eps)
    w = np.array(weights, dtype=np.int64)
    left = np.zeros(len(masks), dtype=np.int64)
    for v in range(n):
        left += ((masks >> v) & 1) * w[v]
    right = w.sum() - left
    cut = np.zeros(len(masks), dtype=np.int64)
    for u, v, ew in edges:
        cut += (((masks >> u) ^ (masks >> v)) & 1) * ew
    ok = (left <= bound) & (right <= bound)
    return int(cut[ok].min())


def best_kway(n, edges, k, eps, weights=None):
    weights = weights or [1] * n
    bound = l_max(weights, k, eps)
    best = None
    for assign in itertools.product(range(k), repeat=n):
        bw = [0] * k
        for v, b in enumerate(assign):
            bw[b] += weights[v]
        if max(bw) > bound:
            continue
        c = cut_of(edges, assign)
        if best is None or c < best:
            best = c
    return best


def max_matching_weight(n, scored_edges):
    """Best total score over all matchings; ``scored_edges`` is ``[(score, u, v)]``."""
    best = 0
    m = len(scored_edges)
    for mask in range(1 << m):
        used = set()
        total = 0
        ok = True
        for i in range(m):
            if mask >> i & 1:
                s, u, v = scored_edges[i]
                if u in used or v in used:
                    ok = False
                    break
                used.update((u, v))
                total += s
        if ok:
            best = max(best, total)
    return best


def all_min_cuts(n, arcs, s, t):
    """``(value, set of frozenset source sides)`` by enumerating every s-t cut.

    ``arcs`` is a list of ``(u, v, cap)`` directed arcs.
    """
    others = [v for v in range(n) if v != s and v != t]
    best = None
    sides = set()
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            side = frozenset((s,) + combo)
            c = sum(cap for u, v, cap in arcs if u in side and v not in side)
            if best is None or c < best:
                best, sides = c, {side}
            elif c == best:
                sides.add(side)
    return best, sides


def edmonds_karp(n, arcs, s, t):
    cap = {}
    adj = [set() for _ in range(n)]
    for u, v, c in arcs:
        cap[(u, v)] = cap.get((u, v), 0) + c
        cap.setdefault((v, u), 0)
        adj[u].add(v)
        adj[v].add(u)
    flow = 0
    while True:
        parent = {s: None}
        q = deque([s])
        while q and t not in parent:
            u = q.popleft()
            for v in adj[u]:
                if v not in parent and cap[(u, v)] > 0:
                    parent[v] = u
                    q.append(v)
        if t not in parent:
            return flow
        path = []
        v = t
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        aug = min(cap[e] for e in path)
        for u, v in path:
            cap[(u, v)] -= aug
            cap[(v, u)] += aug
        flow += aug


def random_network(rng, n_max=12, p=0.35, cap_max=6):
    n = rng.randint(2, n_max)
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                arcs.append((u, v, rng.randint(0, cap_max)))
    return n, arcs


def random_edges(rng, n, p=0.4, w_max=1):
    return [(u, v, rng.randint(1, w_max)) for u in range(n) for v in range(u + 1, n)
            if rng.random() < p]


def geomean(xs):
    return math.prod(xs) ** (1 / len(xs))


def balanced_assignment(n, k, weights, rng):
    """Feasible start: heaviest-first greedy onto the lightest block, random ties."""
    order = sorted(range(n), key=lambda v: (-weights[v], rng.random()))
    bw = [0] * k
    block_of = [0] * n
    for v in order:
        b = min(range(k), key=lambda i: (bw[i], rng.random()))
        block_of[v] = b
        bw[b] += weights[v]
    return block_of


def scramble(block_of, k, weights, eps, rng, swaps=None):
    """Random feasible perturbation by pairwise swaps of equal-weight nodes across blocks."""
    block_of = list(block_of)
    n = len(block_of)
    for _ in range(swaps if swaps is not None else n):
        u, v = rng.randrange(n), rng.randrange(n)
        if weights[u] == weights[v]:
            block_of[u], block_of[v] = block_of[v], block_of[u]
    return block_of


def random_instance(seed, n_range=(8, 60), k_choices=(2, 3, 4), weighted=False):
    rng = random.Random(seed)
    n = rng.randint(*n_range)
    edges = random_edges(rng, n, p=min(1.0, 4.0 / n), w_max=3 if weighted else 1)
    # a spanning path keeps most instances connected
    edges += [(v, v + 1, 1) for v in range(n - 1) if rng.random() < 0.7]
    weights = [rng.randint(1, 3) for _ in range(n)] if weighted else [1] * n
    k = rng.choice(k_choices)
    return rng, n, edges, weights, k
