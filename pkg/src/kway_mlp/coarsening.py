"""Iterated matching and contraction down to a small coarsest graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import Graph, contract, matching_pairs
from .matching import EXPANSION2, gpa_matching, random_matching, rate_edges


def stop_threshold(n: int, k: int) -> float:
    """Coarsening stops once fewer than ``max(60k, n/(60k))`` nodes remain."""
    return max(60 * k, n / (60 * k))


def node_weight_cap(n: int, k: int) -> float:
    return 1.5 * n / (20 * k)


@dataclass
class CoarseningConfig:
    k: int
    random_levels: int = 0
    first_rating: str = EXPANSION2
    rating: str = EXPANSION2
    max_levels: int | None = None


@dataclass
class CoarseningHierarchy:
    """``graphs[0]`` is the input; ``mappings[i]`` maps ``graphs[i]`` onto ``graphs[i+1]``."""

    graphs: list
    matchings: list = field(default_factory=list)
    mappings: list = field(default_factory=list)
    stopped_by: str = "threshold"

    @property
    def coarsest(self) -> Graph:
        return self.graphs[-1]

    def __len__(self) -> int:
        return len(self.graphs)


def coarsen(graph: Graph, config: CoarseningConfig, rng, forbidden=None,
            level_offset: int = 0, original_n: int | None = None) -> CoarseningHierarchy:
    """Match and contract until the graph falls below the stop threshold.

    ``forbidden`` is an optional block assignment; edges between different
    blocks are never matched, so the assignment survives every contraction.
    ``level_offset`` is the depth of ``graph`` below the input graph and
    selects the matching algorithm per level; ``original_n`` fixes the size
    used by the threshold and weight-cap formulas.
    """
    n0 = original_n if original_n is not None else graph.n
    threshold = stop_threshold(n0, config.k)
    cap = node_weight_cap(n0, config.k)
    hierarchy = CoarseningHierarchy([graph])
    current = graph
    blocks = forbidden
    level = level_offset
    while current.n >= threshold:
        if config.max_levels is not None and len(hierarchy.matchings) >= config.max_levels:
            hierarchy.stopped_by = "max_levels"
            break
        vwgt = current.vwgt

        if blocks is None:
            def eligible(u, v, vwgt=vwgt):
                return vwgt[u] + vwgt[v] <= cap
        else:
            def eligible(u, v, vwgt=vwgt, blocks=blocks):
                return blocks[u] == blocks[v] and vwgt[u] + vwgt[v] <= cap

        if level < config.random_levels:
            partner = random_matching(current, rng, eligible)
        else:
            rating = config.first_rating if level == 0 else config.rating
            partner = gpa_matching(current, rate_edges(current, rating, rng), rng, eligible)
        if all(p == -1 for p in partner):
            hierarchy.stopped_by = "no_progress"
            break
        coarse, mapping = contract(current, partner)
        if blocks is not None:
            coarse_blocks = [0] * coarse.n
            for v, x in enumerate(mapping):
                coarse_blocks[x] = blocks[v]
            blocks = coarse_blocks
        hierarchy.graphs.append(coarse)
        hierarchy.matchings.append(partner)
        hierarchy.mappings.append(mapping)
        current = coarse
        level += 1
    return hierarchy


def shrink_factor(hierarchy: CoarseningHierarchy) -> tuple:
    """Per-level ratios ``n_{i+1}/n_i`` and their geometric mean."""
    sizes = [g.n for g in hierarchy.graphs]
    ratios = [b / a for a, b in zip(sizes, sizes[1:])]
    if not ratios:
        return [], None
    mean = math.exp(sum(math.log(r) for r in ratios) / len(ratios))
    return ratios, mean


def matched_pairs(hierarchy: CoarseningHierarchy, level: int) -> list:
    return matching_pairs(hierarchy.matchings[level])
