#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "streamplace/graph.hpp"
#include "streamplace/model.hpp"
#include "streamplace/types.hpp"

namespace streamplace {

// Upper bound on the fraction of one operator a device may take. A cap of 0
// removes the device from the operator's assignable set.
struct FractionCap {
  int op = 0;
  int device = 0;
  double max_fraction = 0.0;
};

// One candidate data-quality operating point and the placement restrictions
// it implies. The optional placement is used by fixed-placement sweeps to
// evaluate a what-if assignment at this level; optimizers ignore it.
struct DqLevel {
  double dq_fraction = 0.0;
  std::vector<FractionCap> caps;
  std::optional<Placement> placement;
};

struct DqScenario {
  std::vector<DqLevel> levels;
};

ValidationReport validate_scenario(const DqScenario& scenario,
                                   const OperatorGraph& graph,
                                   const DeviceTopology& topo);

// Effective per-entry upper bounds for a level: 0 on unavailable devices,
// min(1, cap) elsewhere.
std::vector<std::vector<double>> level_bounds(const DqLevel& level,
                                              int operator_count,
                                              const DeviceTopology& topo);

struct OptimizerConfig {
  int granularity = 10;       // rows are compositions of 1/granularity (oracle)
  int max_iterations = 2000;  // proposals per restart
  int restarts = 20;
  double move_step = 0.1;            // mass shifted per proposal, in (0, 1]
  double initial_temperature = 0.0;  // 0 disables annealing
  double cooling = 0.95;             // temperature decay per proposal, in (0, 1)
  std::uint64_t seed = 0;
  bool grid_moves = false;  // restrict local search to the 1/granularity grid
  std::uint64_t max_candidates = 10'000'000;  // brute-force refusal guard
};

enum class OptimizeMethod { BruteForce, LocalSearch };

struct OptimizationResult {
  Placement placement;
  double dq_fraction = 0.0;
  double latency = 0.0;
  double objective = 0.0;
  std::uint64_t evaluations = 0;
  OptimizeMethod method = OptimizeMethod::BruteForce;
  int level_index = -1;  // scenario level that won, -1 without a scenario
};

struct CandidateEvaluation {
  double latency = 0.0;
  double objective = 0.0;
  double network_volume = 0.0;
};

// Bundles total_latency, objective_f and network_volume for one placement.
// Throws InvalidCandidateError when the placement fails validation.
CandidateEvaluation evaluate_candidate(const OperatorGraph& graph,
                                       const DeviceTopology& topo,
                                       const Placement& placement,
                                       const ModelParams& params);

// Exhaustive search over all placements whose rows are compositions of
// granularity over each operator's assignable devices, crossed with the
// scenario levels (or the fixed dq_fraction in params when scenario is
// null). Ties are broken by lowest dq_fraction, then by lexicographically
// smallest flattened placement. Throws SearchSpaceError when the candidate
// count exceeds config.max_candidates.
OptimizationResult brute_force_optimize(const OperatorGraph& graph,
                                        const DeviceTopology& topo,
                                        const ModelParams& params,
                                        const DqScenario* scenario,
                                        const OptimizerConfig& config);

// Seeded multi-restart local search: each proposal shifts move_step of mass
// between two assignable devices of one operator (row clipped at 0 and
// renormalized), accepting strict improvements and, when
// initial_temperature > 0, worse moves per the annealing schedule. With
// grid_moves the walk stays on the 1/granularity grid searched by the brute
// force. Deterministic for a fixed seed.
OptimizationResult local_search_optimize(const OperatorGraph& graph,
                                         const DeviceTopology& topo,
                                         const ModelParams& params,
                                         const DqScenario* scenario,
                                         const OptimizerConfig& config);

// Runs the chosen method once per scenario level under that level's caps and
// returns the level + placement pair minimizing the objective.
OptimizationResult optimize_with_dq(const OperatorGraph& graph,
                                    const DeviceTopology& topo,
                                    const ModelParams& params,
                                    const DqScenario& scenario,
                                    const OptimizerConfig& config,
                                    OptimizeMethod method);

}  // namespace streamplace
