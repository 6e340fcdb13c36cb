"""Covering placements and alarm-response strategies for patrolling games.

The package resolves security settings where mobile defensive resources react
to spatially uncertain alarm signals: it computes minimum covering
placements, generates covering routes per signal, and solves the response
games under full, partial or no coordination, with an anytime pipeline and a
batch CLI on top.
"""

__version__ = "0.1.0"

from .games import MatrixGame, MixedStrategy, solve_zero_sum
from .lp import LinearProgram, LinearProgramSolution, lp_solve
from .mincover import (
    CoveringPlacement,
    MinCoverResult,
    OverlapMetrics,
    SetCoverInstance,
    cycle_min_cover,
    exact_cover,
    greedy_cover,
    local_search_improve,
    min_cover,
    overlap_metrics,
    to_set_cover,
    tree_min_cover,
)
from .model import (
    AlarmSystem,
    PatrollingSetting,
    all_pairs_distances,
    build_alarm,
    build_setting,
    coverage_set,
    coverage_sets,
)
from .oracles import (
    OracleResult,
    SignalResponse,
    aggregate_value,
    best_response_ilp,
    evaluate_profile,
    fc_sro,
    nc_sro,
    pc_sro,
    respond,
)
from .pipeline import (
    GeneratorParams,
    ResolutionConfig,
    ResolutionReport,
    enumerate_placements,
    generate_instance,
    resolve,
)
from .routes import CoveringRoute, JointRoute, RouteSet, covering_routes, covers, joint_covers

__all__ = [
    "AlarmSystem",
    "CoveringPlacement",
    "CoveringRoute",
    "GeneratorParams",
    "JointRoute",
    "LinearProgram",
    "LinearProgramSolution",
    "MatrixGame",
    "MinCoverResult",
    "MixedStrategy",
    "OracleResult",
    "OverlapMetrics",
    "PatrollingSetting",
    "ResolutionConfig",
    "ResolutionReport",
    "RouteSet",
    "SetCoverInstance",
    "SignalResponse",
    "aggregate_value",
    "all_pairs_distances",
    "best_response_ilp",
    "build_alarm",
    "build_setting",
    "coverage_set",
    "coverage_sets",
    "covering_routes",
    "covers",
    "cycle_min_cover",
    "enumerate_placements",
    "evaluate_profile",
    "exact_cover",
    "fc_sro",
    "generate_instance",
    "greedy_cover",
    "joint_covers",
    "local_search_improve",
    "lp_solve",
    "min_cover",
    "nc_sro",
    "overlap_metrics",
    "pc_sro",
    "resolve",
    "respond",
    "solve_zero_sum",
    "to_set_cover",
    "tree_min_cover",
]
