"""Meek-rule orientation of causal graphs with reusable single-edge closure tables."""

from .consistency import ConsistencyVerdict, check_consistency, edges_consistent, pdag_to_dag
from .design import (
    active_learning_run,
    lower_bound_clique,
    lower_bound_node,
    minmax_true_worst,
    select_lb_node,
    select_minmax_node,
)
from .dp import (
    DpoTable,
    DpTable,
    build_dp_table,
    essential_from_mpdag,
    i_essential_after_intervention,
    orient_one_edge,
)
from .graph import Edge, MixedGraph, arc, line, random_chordal
from .mec import brute_force_mec_size, count_mec
from .meek import ConflictError, Rule, meek_closure

__version__ = "0.1.0"

__all__ = [
    "ConflictError",
    "ConsistencyVerdict",
    "DpTable",
    "DpoTable",
    "Edge",
    "MixedGraph",
    "Rule",
    "active_learning_run",
    "arc",
    "brute_force_mec_size",
    "build_dp_table",
    "check_consistency",
    "count_mec",
    "edges_consistent",
    "essential_from_mpdag",
    "i_essential_after_intervention",
    "line",
    "lower_bound_clique",
    "lower_bound_node",
    "meek_closure",
    "minmax_true_worst",
    "orient_one_edge",
    "pdag_to_dag",
    "random_chordal",
    "select_lb_node",
    "select_minmax_node",
]
