#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamplace/optimize.hpp"
#include "streamplace/types.hpp"
#include "streamplace/validation.hpp"

namespace streamplace {

// One self-contained problem instance as read from disk.
struct ProblemBundle {
  OperatorGraph graph;
  DeviceTopology topology;
  ModelParams params;
  std::optional<Placement> placement;
  std::optional<DqScenario> scenario;
};

// Structural decoding: field presence, types and cross-dimension agreement.
// Throws BundleError with field context on malformed input.
ProblemBundle parse_bundle(const nlohmann::json& doc);

// Semantic checks: validate_graph + validate_topology + validate_placement
// (+ scenario), merged into one report.
ValidationReport validate_bundle(const ProblemBundle& bundle);

// parse_bundle + validate_bundle; throws BundleError carrying the rendered
// report when any error-severity issue is present.
ProblemBundle load_bundle(const std::string& path);

nlohmann::json bundle_to_json(const ProblemBundle& bundle);
void save_bundle(const ProblemBundle& bundle, const std::string& path);

nlohmann::json placement_to_json(const Placement& placement);
void save_placement(const Placement& placement, const std::string& path);

struct SweepRow {
  double beta = 0.0;
  double dq_fraction = 0.0;
  double latency = 0.0;
  double objective = 0.0;
  std::string method;  // "fixed", "brute_force" or "local_search"
};

// One row per (beta, dq) combination, ascending in (beta, dq).
//
// Fixed sweep (no method): the bundle placement is evaluated at every
// combination; when dq_values is empty the bundle scenario supplies the dq
// axis and each level is evaluated with its own placement (falling back to
// the bundle placement, checked against the level's caps).
//
// Re-optimizing sweep (method set): the chosen optimizer runs per
// combination, or per scenario level when dq_values is empty.
std::vector<SweepRow> run_sweep(const ProblemBundle& bundle,
                                std::vector<double> betas,
                                std::vector<double> dq_values,
                                std::optional<OptimizeMethod> method,
                                const OptimizerConfig& config);

// Header `beta,dq_fraction,latency,objective,method`; numbers printed with
// 17 significant digits so rows are bit-stable.
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Printf-style %.*g with a fixed significant-digit count.
std::string format_double(double value, int significant_digits);

}  // namespace streamplace
