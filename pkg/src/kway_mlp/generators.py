"""Synthetic test graphs."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from .graph import Graph


def grid2d(rows: int, cols: int) -> Graph:
    """4-neighbour grid with unit weights; node id is ``r * cols + c``."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1, 1))
            if r + 1 < rows:
                edges.append((v, v + cols, 1))
    return Graph.from_edges(rows * cols, edges)


def random_geometric_graph(n: int, seed: int = 0, radius: float | None = None) -> Graph:
    """Unit-square RGG; the default radius ``0.55 sqrt(ln n / n)`` keeps it mostly connected."""
    if radius is None:
        radius = 0.55 * math.sqrt(math.log(n) / n)
    pts = np.random.default_rng(seed).random((n, 2))
    pairs = cKDTree(pts).query_pairs(radius, output_type="ndarray")
    return Graph.from_edges(n, [(int(u), int(v), 1) for u, v in pairs])


def delaunay_graph(n: int, seed: int = 0) -> Graph:
    """Delaunay triangulation of ``n`` uniform random points."""
    pts = np.random.default_rng(seed).random((n, 2))
    tri = Delaunay(pts)
    edges = set()
    for a, b, c in tri.simplices:
        for u, v in ((a, b), (b, c), (a, c)):
            edges.add((int(min(u, v)), int(max(u, v))))
    return Graph.from_edges(n, [(u, v, 1) for u, v in sorted(edges)])
