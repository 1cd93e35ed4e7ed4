"""Regular decomposition of large sparse graphs from hop-distance matrices."""

__version__ = "0.1.0"

from .core import (RDConfig, RDModel, classify, classify_many, estimate_means,
                   expand_partition, local_update, misclassification_rate,
                   node_costs, regular_decomposition, select_k, total_cost)
from .estimator import RegularDecomposition
from .generators import (PlantedParams, SBMParams, planted_partition,
                         preferential_attachment, sbm)
from .graph import (DistanceMatrix, Graph, distance_matrix, giant_component,
                    parse_edge_list, read_edge_list, sssp_distances)
from .sampling import ReferenceSet, betweenness_references, uniform_references

__all__ = [
    "RDConfig", "RDModel", "RegularDecomposition", "classify", "classify_many",
    "estimate_means", "expand_partition", "local_update",
    "misclassification_rate", "node_costs", "regular_decomposition", "select_k",
    "total_cost", "PlantedParams", "SBMParams", "planted_partition",
    "preferential_attachment", "sbm", "DistanceMatrix", "Graph",
    "distance_matrix", "giant_component", "parse_edge_list", "read_edge_list",
    "sssp_distances", "ReferenceSet", "betweenness_references",
    "uniform_references",
]
