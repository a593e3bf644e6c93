"""Command-line entry point: ``kway-mlp partition`` and ``kway-mlp bench``."""

from __future__ import annotations

import argparse
import random
import sys
import time

from . import generators
from .bench import run_normal_test
from .graph import Partition, edge_cut
from .initial import InfeasiblePartitionError
from .io import MetisFormatError, read_metis, read_partition, write_partition
from .presets import PRESETS, AlgorithmConfig, UnsupportedConfigurationError, build_config
from .scheduling import partition_graph


def _load_config(args) -> AlgorithmConfig:
    config = build_config(args.preset, args.k, args.imbalance, args.seed)
    if args.config:
        with open(args.config) as fh:
            config = AlgorithmConfig.from_kv(fh.read(), base=config)
    if args.cycles is not None:
        if args.cycles < 1:
            raise ValueError("--cycles must be at least 1")
        config = config.replace(cycles=args.cycles)
    return config


def cmd_partition(args) -> int:
    start = time.perf_counter()
    config = _load_config(args)
    graph = read_metis(args.graph)
    inherited = None
    if args.input_partition:
        block_of = read_partition(args.input_partition, graph.n, args.k)
        inherited = Partition(graph, block_of, args.k, args.imbalance)
    p = partition_graph(graph, config, inherited=inherited, rng=random.Random(args.seed))
    if not p.is_feasible():
        raise InfeasiblePartitionError("result violates the balance constraint")
    write_partition(args.output, p)
    elapsed = time.perf_counter() - start
    print(f"cut={edge_cut(graph, p)} balance={p.balance():.6f} time_s={elapsed:.3f}")
    return 0


def _instances(args):
    if args.graphs:
        return [(path, read_metis(path)) for path in args.graphs]
    make = {
        "grid": lambda i: generators.grid2d(args.n, args.n),
        "rgg": lambda i: generators.random_geometric_graph(args.n, seed=i),
        "delaunay": lambda i: generators.delaunay_graph(args.n, seed=i),
    }[args.generator]
    return [(f"{args.generator}{args.n}_{i}", make(i)) for i in range(args.instances)]


def cmd_bench(args) -> int:
    config = _load_config(args)
    report = run_normal_test(_instances(args), config, args.repetitions, csv_path=args.csv)
    for res in report.instances:
        print(f"{res.graph} avg_cut={res.avg_cut:.2f} best_cut={res.best_cut} "
              f"avg_time_s={res.avg_time:.3f}")
    print(f"geomean avg_cut={report.geomean_avg_cut:.2f} best_cut={report.geomean_best_cut:.2f} "
          f"time_s={report.geomean_time:.3f}")
    return 0


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, required=True, help="number of blocks")
    p.add_argument("--imbalance", type=float, default=0.03, help="allowed imbalance (default 0.03)")
    p.add_argument("--preset", choices=PRESETS, default="strong")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cycles", type=int, help="override the preset's number of global cycles")
    p.add_argument("--config", help="key = value file overriding preset fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kway-mlp", description="Multilevel k-way graph partitioner")
    sub = parser.add_subparsers(dest="command", required=True)

    part = sub.add_parser("partition", help="partition a METIS graph file")
    part.add_argument("--graph", required=True, help="METIS graph file")
    _common(part)
    part.add_argument("--input-partition", help="partition file to improve (skips initial partitioning)")
    part.add_argument("--output", required=True, help="where to write the block ids")
    part.set_defaults(func=cmd_partition)

    bench = sub.add_parser("bench", help="normal test over files or generated instances")
    bench.add_argument("--graphs", nargs="*", help="METIS files; generated instances otherwise")
    bench.add_argument("--generator", choices=("grid", "rgg", "delaunay"), default="rgg")
    bench.add_argument("--n", type=int, default=2000, help="nodes (grid: side length)")
    bench.add_argument("--instances", type=int, default=5)
    bench.add_argument("--repetitions", type=int, default=3)
    bench.add_argument("--csv", help="write per-run rows to this CSV file")
    _common(bench)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedConfigurationError as exc:
        print(f"error: unsupported configuration: {exc}", file=sys.stderr)
    except (MetisFormatError, InfeasiblePartitionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
