"""Quality-aware cost model and placement optimizer for streaming dataflows.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from streamplace._core import (
    BundleError,
    CandidateEvaluation,
    CriticalPathResult,
    DagPath,
    DeviceTopology,
    DqLevel,
    DqScenario,
    Edge,
    EdgeLatencyBreakdown,
    FractionCap,
    InfeasibleError,
    IssueSeverity,
    LinkCountMode,
    ModelParams,
    OperatorGraph,
    Operator,
    OptimizationResult,
    OptimizeMethod,
    OptimizerConfig,
    PathExplosionError,
    Placement,
    ProblemBundle,
    SearchSpaceError,
    SweepRow,
    ValidationIssue,
    ValidationReport,
    brute_force_optimize,
    bundle_from_json,
    bundle_to_json,
    count_paths,
    critical_path,
    edge_latency,
    enabled_links,
    enumerate_paths,
    evaluate_candidate,
    format_double,
    level_bounds,
    load_bundle,
    local_search_optimize,
    network_volume,
    objective_f,
    optimize_with_dq,
    path_latency,
    run_sweep,
    save_bundle,
    save_placement,
    sweep_csv,
    total_latency,
    validate_bundle,
    validate_graph,
    validate_placement,
    validate_scenario,
    validate_topology,
)

__all__ = [
    "BundleError",
    "CandidateEvaluation",
    "CriticalPathResult",
    "DagPath",
    "DeviceTopology",
    "DqLevel",
    "DqScenario",
    "Edge",
    "EdgeLatencyBreakdown",
    "FractionCap",
    "InfeasibleError",
    "IssueSeverity",
    "LinkCountMode",
    "ModelParams",
    "OperatorGraph",
    "Operator",
    "OptimizationResult",
    "OptimizeMethod",
    "OptimizerConfig",
    "PathExplosionError",
    "Placement",
    "ProblemBundle",
    "SearchSpaceError",
    "SweepRow",
    "ValidationIssue",
    "ValidationReport",
    "brute_force_optimize",
    "bundle_from_json",
    "bundle_to_json",
    "count_paths",
    "critical_path",
    "edge_latency",
    "enabled_links",
    "enumerate_paths",
    "evaluate_candidate",
    "format_double",
    "level_bounds",
    "load_bundle",
    "local_search_optimize",
    "network_volume",
    "objective_f",
    "optimize_with_dq",
    "path_latency",
    "run_sweep",
    "save_bundle",
    "save_placement",
    "sweep_csv",
    "total_latency",
    "validate_bundle",
    "validate_graph",
    "validate_placement",
    "validate_scenario",
    "validate_topology",
]
