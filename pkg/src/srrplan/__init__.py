"""Structural-redundancy pruning planner for convolutional networks.

Builds per-layer filter graphs from trained weights, scores each layer's
structural redundancy from the quotient size and a covering-number
estimate, allocates a pruning budget across layers, emits concrete
min-weight pruning plans with FLOPs accounting, and ships a Monte Carlo
model of the pruned-vs-original performance ordering.
"""
from .bench import BenchRow, bench_covering, hub_chain_adjacency
from .covering import (ORACLE_VERTEX_GUARD, CoverEstimate, covering_oracle,
                       estimate_n1c, greedy_cover)
from .errors import (InfeasibleError, ParseError, PlanMismatchError, SrrError,
                     ValidationError)
from .filter_graph import (UNIT, ZERO, FilterGraph, FilterVector, build_graph,
                           build_layer_graph, connected_components, degree,
                           flatten_normalize, graph_distance, remove_vertex)
from .flops import (FlopsReport, conv_flops, flops_after_removals, layer_flops,
                    model_flops, plan_flops_drop)
from .graphgen import er_adjacency, realize, realized_graph
from .redundancy import (GRAPH_METRIC, MIN_WEIGHT_REMOVAL, NOF_METRIC,
                         RANDOM_REMOVAL, AllocationResult, AllocationStep,
                         FilterBudget, FlopsBudget, LayerRedundancyReport,
                         RedundancyWeights, allocate, analyze_model,
                         graph_redundancy, nof_redundancy)
from .selection import (L1, L2, MIN_WEIGHT, RANDOM, PruningPlan, apply_plan,
                        load_plan, make_plan, plan_from_dict, plan_to_dict,
                        rank_filters_min_weight, rank_filters_random)
from .statmodel import (DistSpec, Estimate, OrderingCheck, StatEstimates,
                        StatModelConfig, SweepRow, SweepSpec, convergence_sweep,
                        parse_config, simulate_system, verify_ordering)
from .weights_io import (ArchLayer, ArchSpec, BoundModel, LayerTensor,
                         ModelWeights, arch_from_dict, arch_from_weights,
                         arch_to_dict, bind, load_arch, load_weights,
                         parse_weights, serialize_weights, write_arch,
                         write_weights)

__version__ = "0.1.0"

__all__ = [
    "ArchLayer", "ArchSpec", "AllocationResult", "AllocationStep", "BenchRow",
    "BoundModel", "CoverEstimate", "DistSpec", "Estimate", "FilterBudget",
    "FilterGraph", "FilterVector", "FlopsBudget", "FlopsReport",
    "GRAPH_METRIC", "InfeasibleError", "L1", "L2", "LayerRedundancyReport",
    "LayerTensor", "MIN_WEIGHT", "MIN_WEIGHT_REMOVAL", "ModelWeights",
    "NOF_METRIC", "ORACLE_VERTEX_GUARD", "OrderingCheck", "ParseError",
    "PlanMismatchError", "PruningPlan", "RANDOM", "RANDOM_REMOVAL",
    "RedundancyWeights", "SrrError", "StatEstimates", "StatModelConfig",
    "SweepRow", "SweepSpec", "UNIT", "ValidationError", "ZERO", "allocate",
    "analyze_model", "apply_plan", "arch_from_dict", "arch_from_weights",
    "arch_to_dict", "bench_covering", "bind", "build_graph",
    "build_layer_graph", "connected_components", "conv_flops",
    "convergence_sweep", "covering_oracle", "degree", "er_adjacency",
    "estimate_n1c", "flatten_normalize", "flops_after_removals",
    "graph_distance", "graph_redundancy", "greedy_cover",
    "hub_chain_adjacency", "layer_flops", "load_arch", "load_plan",
    "load_weights", "make_plan", "model_flops", "nof_redundancy",
    "parse_config", "parse_weights", "plan_flops_drop", "plan_from_dict",
    "plan_to_dict", "rank_filters_min_weight", "rank_filters_random",
    "realize", "realized_graph", "remove_vertex", "serialize_weights",
    "simulate_system", "verify_ordering", "write_arch", "write_weights",
]
