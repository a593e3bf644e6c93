"""Multilevel k-way graph partitioning with FM and flow-based refinement."""

from .graph import (Graph, InvalidPartitionError, Partition, build_quotient_graph,
                    compute_l_max, contract, edge_cut, project_partition)
from .initial import InfeasiblePartitionError
from .io import MetisFormatError, read_metis, read_partition, write_metis, write_partition
from .presets import AlgorithmConfig, UnsupportedConfigurationError, build_config
from .scheduling import cycle_cost_bound, partition_graph, run_cycle

__all__ = [
    "AlgorithmConfig", "Graph", "InfeasiblePartitionError", "InvalidPartitionError",
    "MetisFormatError", "Partition", "UnsupportedConfigurationError", "build_config",
    "build_quotient_graph", "compute_l_max", "contract", "cycle_cost_bound", "edge_cut",
    "partition_graph", "project_partition", "read_metis", "read_partition", "run_cycle",
    "write_metis", "write_partition",
]
