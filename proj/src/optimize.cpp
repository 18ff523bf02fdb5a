#include "streamplace/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

namespace streamplace {

namespace {

constexpr double kCapSlack = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream seed for one (level, restart) pair; restarts are independent.
std::uint64_t restart_seed(std::uint64_t seed, std::uint64_t level,
                           std::uint64_t restart) {
  return splitmix64(seed ^ splitmix64(level + 1) ^
                    splitmix64(splitmix64(restart + 1)));
}

// Uniform integer in [0, n) by rejection; identical across platforms.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_config(const OptimizerConfig& config) {
  if (config.granularity < 1) {
    throw std::invalid_argument("granularity must be at least 1");
  }
  if (config.restarts < 1) {
    throw std::invalid_argument("restarts must be at least 1");
  }
  if (config.max_iterations < 0) {
    throw std::invalid_argument("max_iterations must be nonnegative");
  }
  if (!(config.move_step > 0.0) || config.move_step > 1.0) {
    throw std::invalid_argument("move_step must lie in (0, 1]");
  }
  if (!(config.cooling > 0.0) || !(config.cooling < 1.0)) {
    throw std::invalid_argument("cooling must lie in (0, 1)");
  }
  if (config.initial_temperature < 0.0) {
    throw std::invalid_argument("initial_temperature must be nonnegative");
  }
}

// Levels to search, ascending dq_fraction, each tagged with its original
// index. A null scenario becomes one synthetic level at params.dq_fraction
// tagged -1.
std::vector<std::pair<int, DqLevel>> search_levels(
    const ModelParams& params, const DqScenario* scenario) {
  std::vector<std::pair<int, DqLevel>> levels;
  if (scenario == nullptr) {
    levels.push_back({-1, DqLevel{params.dq_fraction, {}, std::nullopt}});
    return levels;
  }
  for (std::size_t l = 0; l < scenario->levels.size(); ++l) {
    levels.push_back({static_cast<int>(l), scenario->levels[l]});
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const auto& a, const auto& b) {
                     return a.second.dq_fraction < b.second.dq_fraction;
                   });
  return levels;
}

// Tie order for results: objective, then dq_fraction, then the flattened
// placement matrix.
bool better_result(double objective, double dq, const Placement& placement,
                   const OptimizationResult& best) {
  if (objective != best.objective) return objective < best.objective;
  if (dq != best.dq_fraction) return dq < best.dq_fraction;
  return placement.fractions < best.placement.fractions;
}

// Per-device unit capacities on the 1/granularity grid implied by bounds.
std::vector<int> grid_capacities(const std::vector<double>& bounds_row,
                                 int granularity) {
  std::vector<int> caps(bounds_row.size());
  for (std::size_t u = 0; u < bounds_row.size(); ++u) {
    const double scaled = bounds_row[u] * granularity + kCapSlack;
    caps[u] = std::clamp(static_cast<int>(std::floor(scaled)), 0, granularity);
  }
  return caps;
}

// All rows whose entries are multiples of 1/granularity summing to 1 and
// obeying the unit capacities, in ascending lexicographic order.
std::vector<std::vector<double>> enumerate_rows(const std::vector<int>& caps,
                                                int granularity) {
  const int n = static_cast<int>(caps.size());
  std::vector<std::vector<double>> rows;
  std::vector<int> units(n, 0);
  auto emit = [&]() {
    std::vector<double> row(n);
    for (int u = 0; u < n; ++u) {
      row[u] = static_cast<double>(units[u]) / granularity;
    }
    rows.push_back(std::move(row));
  };
  auto rec = [&](auto&& self, int dev, int remaining) -> void {
    if (dev == n - 1) {
      if (remaining <= caps[dev]) {
        units[dev] = remaining;
        emit();
      }
      return;
    }
    const int top = std::min(caps[dev], remaining);
    for (int k = 0; k <= top; ++k) {
      units[dev] = k;
      self(self, dev + 1, remaining - k);
    }
    units[dev] = 0;
  };
  if (n > 0) rec(rec, 0, granularity);
  return rows;
}

ModelParams with_dq(const ModelParams& params, double dq) {
  ModelParams out = params;
  out.dq_fraction = dq;
  return out;
}

}  // namespace

ValidationReport validate_scenario(const DqScenario& scenario,
                                   const OperatorGraph& graph,
                                   const DeviceTopology& topo) {
  ValidationReport report;
  if (scenario.levels.empty()) {
    report.add_error("empty-scenario", "scenario has no levels");
    return report;
  }
  const int ops = graph.operator_count();
  for (std::size_t l = 0; l < scenario.levels.size(); ++l) {
    const DqLevel& level = scenario.levels[l];
    const std::string where = "level " + std::to_string(l) + ": ";

    if (level.dq_fraction < 0.0 || level.dq_fraction > 1.0 ||
        std::isnan(level.dq_fraction)) {
      report.add_error("dq-range", where + "dq_fraction " +
                                       std::to_string(level.dq_fraction) +
                                       " outside [0, 1]");
    }
    for (std::size_t m = 0; m < l; ++m) {
      if (scenario.levels[m].dq_fraction == level.dq_fraction) {
        report.add_error("duplicate-dq",
                         where + "dq_fraction repeats level " +
                             std::to_string(m));
        break;
      }
    }

    bool caps_ok = true;
    for (const FractionCap& cap : level.caps) {
      if (cap.op < 0 || cap.op >= ops || cap.device < 0 ||
          cap.device >= topo.device_count) {
        report.add_error("cap-index",
                         where + "cap targets operator " +
                             std::to_string(cap.op) + ", device " +
                             std::to_string(cap.device) + " out of range");
        caps_ok = false;
      }
      if (cap.max_fraction < 0.0 || std::isnan(cap.max_fraction)) {
        report.add_error("cap-range", where + "cap has max_fraction " +
                                          std::to_string(cap.max_fraction));
        caps_ok = false;
      }
    }
    if (!caps_ok) continue;

    const auto bounds = level_bounds(level, ops, topo);
    for (int i = 0; i < ops; ++i) {
      double reachable = 0.0;
      bool any = false;
      for (double b : bounds[i]) {
        reachable += b;
        if (b > 0.0) any = true;
      }
      if (!any) {
        report.add_error("no-assignable-device",
                         where + "operator " + std::to_string(i) +
                             " has no assignable device");
      } else if (reachable < 1.0 - kCapSlack) {
        report.add_error("infeasible-caps",
                         where + "operator " + std::to_string(i) +
                             " caps sum to " + std::to_string(reachable) +
                             ", below 1");
      }
    }

    if (level.placement.has_value()) {
      const ValidationReport inner =
          validate_placement(*level.placement, graph, topo);
      for (const ValidationIssue& issue : inner.issues) {
        if (issue.severity == IssueSeverity::Error) {
          report.add_error("level-placement", where + issue.message);
        }
      }
      if (inner.ok()) {
        for (int i = 0; i < ops; ++i) {
          for (int u = 0; u < topo.device_count; ++u) {
            if (level.placement->fractions[i][u] > bounds[i][u] + kCapSlack) {
              report.add_error(
                  "level-placement-cap",
                  where + "placement puts " +
                      std::to_string(level.placement->fractions[i][u]) +
                      " of operator " + std::to_string(i) + " on device " +
                      std::to_string(u) + ", above the cap " +
                      std::to_string(bounds[i][u]));
            }
          }
        }
      }
    }
  }
  return report;
}

std::vector<std::vector<double>> level_bounds(const DqLevel& level,
                                              int operator_count,
                                              const DeviceTopology& topo) {
  std::vector<std::vector<double>> bounds(
      operator_count, std::vector<double>(topo.device_count, 0.0));
  for (int i = 0; i < operator_count; ++i) {
    for (int u = 0; u < topo.device_count; ++u) {
      if (i < static_cast<int>(topo.availability.size()) &&
          u < static_cast<int>(topo.availability[i].size()) &&
          topo.availability[i][u]) {
        bounds[i][u] = 1.0;
      }
    }
  }
  for (const FractionCap& cap : level.caps) {
    if (cap.op < 0 || cap.op >= operator_count || cap.device < 0 ||
        cap.device >= topo.device_count) {
      continue;
    }
    const double b = std::clamp(cap.max_fraction, 0.0, 1.0);
    bounds[cap.op][cap.device] = std::min(bounds[cap.op][cap.device], b);
  }
  return bounds;
}

CandidateEvaluation evaluate_candidate(const OperatorGraph& graph,
                                       const DeviceTopology& topo,
                                       const Placement& placement,
                                       const ModelParams& params) {
  const ValidationReport report = validate_placement(placement, graph, topo);
  if (!report.ok()) {
    throw InvalidCandidateError("invalid placement: " + report.to_string());
  }
  CandidateEvaluation eval;
  eval.latency = total_latency(graph, topo, placement, params);
  eval.objective = objective_f(eval.latency, params);
  eval.network_volume = network_volume(graph, topo, placement);
  return eval;
}

OptimizationResult brute_force_optimize(const OperatorGraph& graph,
                                        const DeviceTopology& topo,
                                        const ModelParams& params,
                                        const DqScenario* scenario,
                                        const OptimizerConfig& config) {
  check_config(config);
  const int ops = graph.operator_count();
  const auto levels = search_levels(params, scenario);

  // Row sets per level, sized up front so the guard sees the whole search.
  std::vector<std::vector<std::vector<std::vector<double>>>> level_rows;
  std::uint64_t total_candidates = 0;
  bool saturated = false;
  for (const auto& [index, level] : levels) {
    const auto bounds = level_bounds(level, ops, topo);
    std::vector<std::vector<std::vector<double>>> rows_per_op;
    std::uint64_t level_count = 1;
    for (int i = 0; i < ops; ++i) {
      auto rows = enumerate_rows(grid_capacities(bounds[i], config.granularity),
                                 config.granularity);
      if (rows.empty()) {
        throw InfeasibleError(
            "level " + std::to_string(index) + ": operator " +
            std::to_string(i) + " has no feasible assignment on the 1/" +
            std::to_string(config.granularity) +
            " grid; raise the granularity or relax the caps");
      }
      const std::uint64_t size = rows.size();
      if (level_count > std::numeric_limits<std::uint64_t>::max() / size) {
        saturated = true;
      } else {
        level_count *= size;
      }
      rows_per_op.push_back(std::move(rows));
    }
    if (saturated ||
        total_candidates > std::numeric_limits<std::uint64_t>::max() -
                               level_count) {
      saturated = true;
      total_candidates = std::numeric_limits<std::uint64_t>::max();
    } else {
      total_candidates += level_count;
    }
    level_rows.push_back(std::move(rows_per_op));
  }
  if (saturated || total_candidates > config.max_candidates) {
    throw SearchSpaceError(
        "brute force would evaluate " +
            (saturated ? std::string("more than 18446744073709551615")
                       : std::to_string(total_candidates)) +
            " candidates, above the limit " +
            std::to_string(config.max_candidates) +
            "; lower the granularity or use local search",
        total_candidates);
  }

  OptimizationResult best;
  best.method = OptimizeMethod::BruteForce;
  best.objective = std::numeric_limits<double>::infinity();
  best.dq_fraction = std::numeric_limits<double>::infinity();
  std::uint64_t evaluations = 0;

  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& [index, level] = levels[l];
    const auto& rows_per_op = level_rows[l];
    const ModelParams level_params = with_dq(params, level.dq_fraction);

    Placement placement;
    placement.fractions.resize(ops);
    std::vector<std::size_t> choice(ops, 0);
    for (int i = 0; i < ops; ++i) placement.fractions[i] = rows_per_op[i][0];

    // Odometer with the last operator fastest: candidates arrive in
    // ascending lexicographic order of the flattened matrix.
    while (true) {
      const double latency = total_latency(graph, topo, placement,
                                           level_params);
      const double objective = objective_f(latency, level_params);
      ++evaluations;
      if (better_result(objective, level.dq_fraction, placement, best)) {
        best.placement = placement;
        best.dq_fraction = level.dq_fraction;
        best.latency = latency;
        best.objective = objective;
        best.level_index = index;
      }

      int pos = ops - 1;
      while (pos >= 0) {
        if (++choice[pos] < rows_per_op[pos].size()) {
          placement.fractions[pos] = rows_per_op[pos][choice[pos]];
          break;
        }
        choice[pos] = 0;
        placement.fractions[pos] = rows_per_op[pos][0];
        --pos;
      }
      if (pos < 0) break;
    }
  }

  best.evaluations = evaluations;
  return best;
}

namespace {

// Random grid row: g units dropped one at a time on devices with spare
// capacity, uniformly among them.
std::vector<int> draw_grid_row(std::mt19937_64& rng,
                               const std::vector<int>& caps,
                               int granularity) {
  std::vector<int> units(caps.size(), 0);
  std::vector<int> open;
  for (int step = 0; step < granularity; ++step) {
    open.clear();
    for (std::size_t u = 0; u < caps.size(); ++u) {
      if (units[u] < caps[u]) open.push_back(static_cast<int>(u));
    }
    units[open[draw_below(rng, open.size())]] += 1;
  }
  return units;
}

// Random continuous row: normalized exponentials over the allowed devices,
// then one proportional redistribution pass to respect the bounds.
std::vector<double> draw_continuous_row(std::mt19937_64& rng,
                                        const std::vector<double>& bounds,
                                        const std::vector<int>& allowed) {
  std::vector<double> row(bounds.size(), 0.0);
  double sum = 0.0;
  for (int u : allowed) {
    row[u] = -std::log1p(-draw_unit(rng));
    sum += row[u];
  }
  if (sum <= 0.0) {
    for (int u : allowed) row[u] = 1.0;
    sum = static_cast<double>(allowed.size());
  }
  for (int u : allowed) row[u] /= sum;

  double excess = 0.0;
  double headroom = 0.0;
  for (int u : allowed) {
    if (row[u] > bounds[u]) {
      excess += row[u] - bounds[u];
      row[u] = bounds[u];
    }
    headroom += bounds[u] - row[u];
  }
  if (excess > 0.0 && headroom > 0.0) {
    for (int u : allowed) {
      row[u] += excess * (bounds[u] - row[u]) / headroom;
    }
  }
  return row;
}

}  // namespace

OptimizationResult local_search_optimize(const OperatorGraph& graph,
                                         const DeviceTopology& topo,
                                         const ModelParams& params,
                                         const DqScenario* scenario,
                                         const OptimizerConfig& config) {
  check_config(config);
  const int ops = graph.operator_count();
  const auto levels = search_levels(params, scenario);

  OptimizationResult best;
  best.method = OptimizeMethod::LocalSearch;
  best.objective = std::numeric_limits<double>::infinity();
  best.dq_fraction = std::numeric_limits<double>::infinity();
  std::uint64_t evaluations = 0;

  for (const auto& [index, level] : levels) {
    const auto bounds = level_bounds(level, ops, topo);
    const ModelParams level_params = with_dq(params, level.dq_fraction);

    std::vector<std::vector<int>> allowed(ops);
    std::vector<std::vector<int>> caps(ops);
    std::vector<int> movable;
    for (int i = 0; i < ops; ++i) {
      for (int u = 0; u < topo.device_count; ++u) {
        if (bounds[i][u] > 0.0) allowed[i].push_back(u);
      }
      if (allowed[i].empty()) {
        throw InfeasibleError("level " + std::to_string(index) +
                              ": operator " + std::to_string(i) +
                              " has no assignable device");
      }
      caps[i] = grid_capacities(bounds[i], config.granularity);
      if (config.grid_moves) {
        int reachable = 0;
        for (int c : caps[i]) reachable += c;
        if (reachable < config.granularity) {
          throw InfeasibleError(
              "level " + std::to_string(index) + ": operator " +
              std::to_string(i) + " has no feasible assignment on the 1/" +
              std::to_string(config.granularity) +
              " grid; raise the granularity or relax the caps");
        }
      }
      if (allowed[i].size() >= 2) movable.push_back(i);
    }

    for (int restart = 0; restart < config.restarts; ++restart) {
      std::mt19937_64 rng(restart_seed(
          config.seed, static_cast<std::uint64_t>(index + 1),
          static_cast<std::uint64_t>(restart)));

      // State: unit counts on the grid, raw fractions otherwise.
      std::vector<std::vector<int>> units(ops);
      Placement current;
      current.fractions.resize(ops);
      for (int i = 0; i < ops; ++i) {
        if (config.grid_moves) {
          units[i] = draw_grid_row(rng, caps[i], config.granularity);
          current.fractions[i].resize(topo.device_count);
          for (int u = 0; u < topo.device_count; ++u) {
            current.fractions[i][u] =
                static_cast<double>(units[i][u]) / config.granularity;
          }
        } else {
          current.fractions[i] =
              draw_continuous_row(rng, bounds[i], allowed[i]);
        }
      }

      double current_latency = total_latency(graph, topo, current,
                                             level_params);
      double current_objective = objective_f(current_latency, level_params);
      ++evaluations;
      if (better_result(current_objective, level.dq_fraction, current, best)) {
        best.placement = current;
        best.dq_fraction = level.dq_fraction;
        best.latency = current_latency;
        best.objective = current_objective;
        best.level_index = index;
      }

      double temperature = config.initial_temperature;
      std::vector<double> saved_row;
      std::vector<int> from_pool;
      std::vector<int> to_pool;
      for (int iter = 0; iter < config.max_iterations; ++iter) {
        if (movable.empty()) break;
        temperature *= config.cooling;
        const int op =
            movable[draw_below(rng, movable.size())];

        from_pool.clear();
        for (int u : allowed[op]) {
          if (config.grid_moves ? units[op][u] > 0
                                : current.fractions[op][u] > 0.0) {
            from_pool.push_back(u);
          }
        }
        if (from_pool.empty()) continue;
        const int from = from_pool[draw_below(rng, from_pool.size())];

        to_pool.clear();
        for (int u : allowed[op]) {
          if (u == from) continue;
          if (config.grid_moves ? units[op][u] < caps[op][u]
                                : current.fractions[op][u] +
                                          config.move_step <=
                                      bounds[op][u] + kCapSlack) {
            to_pool.push_back(u);
          }
        }
        if (to_pool.empty()) continue;
        const int to = to_pool[draw_below(rng, to_pool.size())];

        saved_row = current.fractions[op];
        bool feasible = true;
        if (config.grid_moves) {
          units[op][from] -= 1;
          units[op][to] += 1;
          for (int u = 0; u < topo.device_count; ++u) {
            current.fractions[op][u] =
                static_cast<double>(units[op][u]) / config.granularity;
          }
        } else {
          auto& row = current.fractions[op];
          row[from] = std::max(0.0, row[from] - config.move_step);
          row[to] += config.move_step;
          double sum = 0.0;
          for (double v : row) sum += v;
          for (double& v : row) v /= sum;
          for (int u : allowed[op]) {
            if (row[u] > bounds[op][u] + kCapSlack) feasible = false;
          }
        }

        bool accept = false;
        double candidate_latency = 0.0;
        double candidate_objective = 0.0;
        if (feasible) {
          candidate_latency = total_latency(graph, topo, current,
                                            level_params);
          candidate_objective = objective_f(candidate_latency, level_params);
          ++evaluations;
          if (better_result(candidate_objective, level.dq_fraction, current,
                            best)) {
            best.placement = current;
            best.dq_fraction = level.dq_fraction;
            best.latency = candidate_latency;
            best.objective = candidate_objective;
            best.level_index = index;
          }
          const double delta = candidate_objective - current_objective;
          if (delta < 0.0) {
            accept = true;
          } else if (temperature > 0.0) {
            accept = draw_unit(rng) < std::exp(-delta / temperature);
          }
        }

        if (accept) {
          current_latency = candidate_latency;
          current_objective = candidate_objective;
        } else {
          current.fractions[op] = saved_row;
          if (config.grid_moves) {
            units[op][from] += 1;
            units[op][to] -= 1;
          }
        }
      }
    }
  }

  best.evaluations = evaluations;
  return best;
}

OptimizationResult optimize_with_dq(const OperatorGraph& graph,
                                    const DeviceTopology& topo,
                                    const ModelParams& params,
                                    const DqScenario& scenario,
                                    const OptimizerConfig& config,
                                    OptimizeMethod method) {
  const ValidationReport report = validate_scenario(scenario, graph, topo);
  if (!report.ok()) {
    throw std::invalid_argument("invalid scenario:\n" + report.to_string());
  }
  if (method == OptimizeMethod::BruteForce) {
    return brute_force_optimize(graph, topo, params, &scenario, config);
  }
  return local_search_optimize(graph, topo, params, &scenario, config);
}

}  // namespace streamplace
