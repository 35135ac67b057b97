"""Balanced k-way graph partitioning by contracting size-constrained
label propagation clusterings, with LPA refinement during uncoarsening."""

from .ensemble import ensemble_size, overlay
from .generators import GenSpec, generate
from .graph import (Clustering, Graph, InfeasibleError, MetisFormatError,
                    Partition, block_weights, contract, edge_cut, load_metis,
                    max_imbalance, project, read_partition, write_metis,
                    write_partition)
from .initpart import greedy_bipartition, initial_partition
from .lpa import (ActiveQueue, LabelPropagation, LpaParams, cluster,
                  order_nodes, rebalance, refine)
from .multilevel import (Hierarchy, PartitionConfig, PartitionReport,
                         coarsen, coarsening_threshold, compute_cluster_bound,
                         compute_lmax, level_imbalance, partition, uncoarsen)
from .oracle import brute_force_min_cut

__version__ = "0.1.0"

__all__ = [
    "ActiveQueue", "Clustering", "GenSpec", "Graph", "Hierarchy",
    "InfeasibleError", "LabelPropagation", "LpaParams", "MetisFormatError",
    "Partition", "PartitionConfig", "PartitionReport", "block_weights",
    "brute_force_min_cut", "cluster", "coarsen", "coarsening_threshold",
    "compute_cluster_bound", "compute_lmax", "contract", "edge_cut",
    "ensemble_size", "generate", "greedy_bipartition", "initial_partition",
    "level_imbalance", "load_metis", "max_imbalance", "order_nodes",
    "overlay", "partition", "project", "read_partition", "rebalance",
    "refine", "uncoarsen", "write_metis", "write_partition",
]
