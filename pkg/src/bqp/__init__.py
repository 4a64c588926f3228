"""Solver toolkit for bipartite unconstrained 0-1 quadratic maximization."""

from .construct import GreedyTrace, greedy, greedy_trace, random_solution, trivial_solution
from .core import (
    DimensionError,
    IncrementalState,
    Instance,
    Solution,
    evaluate,
    expected_random_objective,
    flip_x,
    flip_y,
    init_state,
    make_solution,
    optimal_x_given_y,
    optimal_y_given_x,
)
from .exact import brute_force_oracle, enumerate_exact, export_lp, export_qubo
from .expr import AlgorithmExpr, ExprError, parse_expr, render_expr, run_expr
from .localsearch import (
    Budget,
    RestrictedReduction,
    alternating,
    exhaustive_portions,
    flip_search,
    random_portions,
    reduce_restricted,
)
from .rowmerge import (
    CooccurrenceGraph,
    RowPartition,
    clustering_row_merge,
    cooccurrence,
    greedy_partition,
    greedy_partition_levels,
    greedy_partition_reference,
    greedy_partition_reference_levels,
    merge_reduce,
    multistart_row_merge,
    partition_weight,
    random_partition,
    rowmerge_local_search,
)
from .store import BestKnownStore, update_best_known
from .testbed import (
    FAMILIES,
    BipartiteGraphSpec,
    CertificateError,
    FormatError,
    GeneratedGraph,
    GenerationError,
    generate_graph,
    generate_instance,
    instance_digest,
    instance_label,
    read_instance,
    read_solution,
    write_instance,
    write_solution,
)
from .vnd import MultiStartRecord, multi_start, vnd, vnd_exhaustive

__version__ = "0.1.0"

__all__ = [
    "AlgorithmExpr",
    "BestKnownStore",
    "BipartiteGraphSpec",
    "Budget",
    "CertificateError",
    "CooccurrenceGraph",
    "DimensionError",
    "ExprError",
    "FAMILIES",
    "FormatError",
    "GeneratedGraph",
    "GenerationError",
    "GreedyTrace",
    "IncrementalState",
    "Instance",
    "MultiStartRecord",
    "RestrictedReduction",
    "RowPartition",
    "Solution",
    "alternating",
    "brute_force_oracle",
    "clustering_row_merge",
    "cooccurrence",
    "enumerate_exact",
    "evaluate",
    "exhaustive_portions",
    "expected_random_objective",
    "export_lp",
    "export_qubo",
    "flip_search",
    "flip_x",
    "flip_y",
    "generate_graph",
    "generate_instance",
    "greedy",
    "greedy_partition",
    "greedy_partition_levels",
    "greedy_partition_reference",
    "greedy_partition_reference_levels",
    "greedy_trace",
    "init_state",
    "instance_digest",
    "instance_label",
    "make_solution",
    "merge_reduce",
    "multi_start",
    "multistart_row_merge",
    "optimal_x_given_y",
    "optimal_y_given_x",
    "parse_expr",
    "partition_weight",
    "random_partition",
    "random_portions",
    "random_solution",
    "read_instance",
    "read_solution",
    "reduce_restricted",
    "render_expr",
    "rowmerge_local_search",
    "run_expr",
    "trivial_solution",
    "update_best_known",
    "vnd",
    "vnd_exhaustive",
    "write_instance",
    "write_solution",
]
