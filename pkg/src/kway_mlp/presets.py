"""Strong / Eco / Fast algorithm configurations."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

from .matching import EXPANSION2, INNER_OUTER

PRESETS = ("strong", "eco", "fast")

ACTIVE_BLOCK = "active_block"
QUOTIENT_RANDOM = "quotient_random"
KWAY_ONLY = "kway_only"


class UnsupportedConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class AlgorithmConfig:
    preset: str
    k: int
    epsilon: float = 0.03
    seed: int = 0
    # coarsening
    random_matching_levels: int = 0
    first_level_rating: str = EXPANSION2
    rating: str = EXPANSION2
    # initial partitioning
    initial_attempts: int = 1
    # global k-way FM before quotient refinement
    kway_rounds: int = 0
    kway_alpha: float = 10.0
    kway_stall_steps: int | None = None
    # quotient-graph refinement
    scheduler: str = ACTIVE_BLOCK
    quotient_max_passes: int = 10
    active_block_max_rounds: int = 50
    two_way_fm: bool = True
    fm_stall_fraction: float | None = 0.05
    fm_stall_steps: int | None = None
    multitry: bool = False
    multitry_alpha: float = 10.0
    multitry_rounds: int = 10
    # flows
    flow: bool = False
    alpha_prime: float = 1.0
    most_balanced: bool = False
    flow_max_iterations: int = 10
    toposort_repetitions: int = 5
    flow_accept_equal_cut: bool = False
    flow_alpha_start: float | None = None  # None starts at alpha_prime
    # global search
    cycle_type: str = "V"
    cycles: int = 1
    level_split: int = 2

    def replace(self, **changes) -> "AlgorithmConfig":
        return dataclasses.replace(self, **changes)

    def to_kv(self) -> str:
        """``key = json-value`` lines, one field per line."""
        return "".join(f"{f.name} = {json.dumps(getattr(self, f.name))}\n"
                       for f in dataclasses.fields(self))

    @classmethod
    def from_kv(cls, text: str, base: "AlgorithmConfig | None" = None) -> "AlgorithmConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in names:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            try:
                values[key] = json.loads(value)
            except json.JSONDecodeError:
                values[key] = value
        if base is not None:
            return dataclasses.replace(base, **values)
        return cls(**values)


def _floor_at_least_one(x: float) -> int:
    return max(1, int(math.floor(x + 1e-9)))


def build_config(preset: str, k: int, epsilon: float = 0.03, seed: int = 0) -> AlgorithmConfig:
    """Full configuration for one of the named presets.

    Formula results are floored with a minimum of 1; logarithms are base 2.
    """
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {PRESETS}")
    if k < 2:
        raise ValueError("k must be at least 2")
    if epsilon <= 0:
        raise UnsupportedConfigurationError("imbalance must be positive; eps = 0 is not supported")
    log_k = math.log2(k)
    if preset == "strong":
        return AlgorithmConfig(
            preset="strong", k=k, epsilon=epsilon, seed=seed,
            random_matching_levels=0,
            first_level_rating=INNER_OUTER, rating=EXPANSION2,
            initial_attempts=_floor_at_least_one(100 / log_k),
            kway_rounds=10, kway_alpha=10.0,
            scheduler=ACTIVE_BLOCK,
            two_way_fm=True, fm_stall_fraction=0.05,
            multitry=True, multitry_alpha=10.0,
            flow=True, alpha_prime=8.0, most_balanced=True,
            cycle_type="F", cycles=2, level_split=2,
        )
    if preset == "eco":
        return AlgorithmConfig(
            preset="eco", k=k, epsilon=epsilon, seed=seed,
            random_matching_levels=_floor_at_least_one(max(2, 7 - log_k)),
            first_level_rating=EXPANSION2, rating=EXPANSION2,
            initial_attempts=_floor_at_least_one(min(10, 40 / log_k)),
            kway_rounds=_floor_at_least_one(min(5, log_k)), kway_alpha=10.0,
            scheduler=ACTIVE_BLOCK,
            two_way_fm=True, fm_stall_fraction=0.01,
            multitry=True, multitry_alpha=10.0,
            flow=True, alpha_prime=2.0, most_balanced=True,
            cycle_type="V", cycles=1,
        )
    small_k = k <= 8
    return AlgorithmConfig(
        preset="fast", k=k, epsilon=epsilon, seed=seed,
        random_matching_levels=4,
        first_level_rating=EXPANSION2, rating=EXPANSION2,
        initial_attempts=1,
        kway_rounds=0 if small_k else 1, kway_stall_steps=15,
        scheduler=QUOTIENT_RANDOM if small_k else KWAY_ONLY,
        quotient_max_passes=1,
        two_way_fm=True, fm_stall_fraction=None, fm_stall_steps=15,
        multitry=False,
        flow=False,
        cycle_type="V", cycles=1,
    )
