// Acceptance gate: one line per criterion, nonzero exit when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamplace/bundle.hpp"
#include "streamplace/graph.hpp"
#include "streamplace/model.hpp"
#include "streamplace/optimize.hpp"
#include "random_instances.hpp"

using namespace streamplace;
using namespace streamplace::testing;

namespace {

int failures = 0;

void run(int index, const std::string& name,
         const std::function<std::string()>& body) {
  std::string detail;
  bool ok = true;
  try {
    detail = body();
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  std::printf("[%s] criterion %d: %s%s%s%s\n", ok ? "PASS" : "FAIL", index,
              name.c_str(), detail.empty() ? "" : " (",
              detail.c_str(), detail.empty() ? "" : ")");
  if (!ok) ++failures;
}

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure(message);
}

void expect_near(double actual, double wanted, const std::string& what) {
  if (std::fabs(actual - wanted) > 1e-9) {
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer), "%s: got %.12g, wanted %.12g",
                  what.c_str(), actual, wanted);
    throw CheckFailure(buffer);
  }
}

double enumerated_maximum(const OperatorGraph& graph,
                          const DeviceTopology& topo,
                          const Placement& placement,
                          const ModelParams& params) {
  double best = 0.0;
  bool first = true;
  for (const DagPath& path : enumerate_paths(graph)) {
    const double latency = path_latency(path, graph, topo, placement, params);
    if (first || latency > best) {
      best = latency;
      first = false;
    }
  }
  return first ? 0.0 : best;
}

using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string bundle_path =
      argc > 1 ? argv[1]
               : std::string(STREAMPLACE_DATA_DIR) + "/example.json";

  ProblemBundle bundle;
  try {
    bundle = load_bundle(bundle_path);
  } catch (const std::exception& err) {
    std::printf("[FAIL] criterion 0: load reference bundle %s (%s)\n",
                bundle_path.c_str(), err.what());
    return 1;
  }

  run(1, "reference instance goldens", [&] {
    const Placement& placement = *bundle.placement;
    const auto first = edge_latency(bundle.graph, bundle.topology, placement,
                                    bundle.params, 0, 1);
    expect_near(first.latency, 0.48, "edge 0->1 latency");
    expect_near(first.per_device_cost[0], 0.48, "edge 0->1 device 0");
    expect_near(first.per_device_cost[1], 0.27, "edge 0->1 device 1");
    expect_near(first.per_device_cost[2], 0.0, "edge 0->1 device 2");

    const auto second = edge_latency(bundle.graph, bundle.topology, placement,
                                     bundle.params, 1, 2);
    expect_near(second.latency, 1.26, "edge 1->2 latency");
    expect_near(second.per_device_cost[0], 1.26, "edge 1->2 device 0");
    expect_near(second.per_device_cost[1], 0.0, "edge 1->2 device 1");
    expect_near(second.per_device_cost[2], 0.45, "edge 1->2 device 2");

    const double total =
        total_latency(bundle.graph, bundle.topology, placement, bundle.params);
    expect_near(total, 1.74, "total latency");
    expect_near(objective_f(total, bundle.params), 1.16,
                "objective at beta 1, dq 0.5");
    return "edge vectors, total 1.74, objective 1.16";
  });

  run(2, "modified sink row goldens", [&] {
    Placement modified = *bundle.placement;
    modified.fractions[2] = {0.0, 0.4, 0.6};
    const auto second = edge_latency(bundle.graph, bundle.topology, modified,
                                     bundle.params, 1, 2);
    expect_near(second.latency, 1.89, "edge 1->2 latency");
    expect_near(second.per_device_cost[0], 1.89, "edge 1->2 device 0");
    expect_near(second.per_device_cost[1], 0.0, "edge 1->2 device 1");
    expect_near(second.per_device_cost[2], 0.18, "edge 1->2 device 2");

    const double total =
        total_latency(bundle.graph, bundle.topology, modified, bundle.params);
    expect_near(total, 2.37, "total latency");

    ModelParams params = bundle.params;
    params.dq_fraction = 1.0;
    expect_near(objective_f(total, params), 1.185,
                "objective at beta 1, dq 1");

    params.beta = 2.0;
    params.dq_fraction = 0.5;
    expect_near(objective_f(1.74, params), 0.87,
                "original objective at beta 2");
    params.dq_fraction = 1.0;
    expect_near(objective_f(total, params), 0.79,
                "modified objective at beta 2");
    return "total 2.37, objectives 1.185 / 0.87 / 0.79";
  });

  run(3, "critical path equals exhaustive path maximum", [&] {
    const auto start = Clock::now();
    std::mt19937_64 rng(20260819);
    const int trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
      const RandomInstance inst = random_instance(rng, 7, 12, 4);
      const double via_dp =
          critical_path(inst.graph, inst.topo, inst.placement, inst.params)
              .latency;
      const double via_enumeration =
          enumerated_maximum(inst.graph, inst.topo, inst.placement,
                             inst.params);
      expect(via_dp == via_enumeration,
             "mismatch at trial " + std::to_string(trial));
    }
    const long long elapsed = ms_since(start);
    expect(elapsed < 10000, "took " + std::to_string(elapsed) + " ms");
    return std::to_string(trials) + " DAGs, exact equality, " +
           std::to_string(elapsed) + " ms";
  });

  run(4, "exhaustive grid search contains the hand placement", [&] {
    ModelParams params = bundle.params;
    params.alpha = 0.0;
    OptimizerConfig config;
    config.granularity = 10;
    const auto result = brute_force_optimize(bundle.graph, bundle.topology,
                                             params, nullptr, config);
    expect(result.latency <= 1.74 + 1e-9,
           "latency " + format_double(result.latency, 6) + " above 1.74");
    expect(static_cast<double>(result.evaluations) <= config.max_candidates,
           "guard should have admitted this instance");

    // The guard itself must refuse a space beyond the candidate cap.
    OperatorGraph big;
    for (int i = 0; i < 5; ++i) big.operators.push_back(Operator{i, 1.0});
    for (int i = 0; i < 4; ++i) big.edges.push_back(Edge{i, i + 1});
    DeviceTopology wide;
    wide.device_count = 4;
    wide.com_cost.assign(4, std::vector<double>(4, 1.0));
    wide.availability.assign(5, std::vector<bool>(4, true));
    bool refused = false;
    try {
      brute_force_optimize(big, wide, params, nullptr, config);
    } catch (const SearchSpaceError&) {
      refused = true;
    }
    expect(refused, "oversized search space was not refused");
    return "optimum " + format_double(result.latency, 4) + " over " +
           std::to_string(result.evaluations) + " candidates; cap enforced";
  });

  run(5, "local search tracks the exhaustive oracle", [&] {
    const auto start = Clock::now();
    std::mt19937_64 rng(5150);
    const int trials = 50;
    for (int trial = 0; trial < trials; ++trial) {
      const RandomInstance inst = random_instance(rng, 3, 3, 3, true);
      OptimizerConfig config;
      config.granularity = 4;
      const auto oracle = brute_force_optimize(inst.graph, inst.topo,
                                               inst.params, nullptr, config);
      expect(oracle.objective > 0.0, "oracle objective must be positive");

      config.seed = 7000 + trial;
      config.restarts = 20;
      config.max_iterations = 250;
      config.grid_moves = true;
      // Annealing lets the walk cross the ridges that strict descent
      // cannot; descent alone stalls 40% above the oracle on some seeds.
      config.initial_temperature = 1.0;
      config.cooling = 0.97;
      const auto search = local_search_optimize(inst.graph, inst.topo,
                                                inst.params, nullptr, config);
      expect(search.objective >= oracle.objective - 1e-12,
             "search beat the oracle on its own grid at trial " +
                 std::to_string(trial));
      const double gap =
          (search.objective - oracle.objective) / oracle.objective;
      expect(gap <= 0.10, "gap " + format_double(gap, 3) + " at trial " +
                              std::to_string(trial));
    }
    const long long elapsed = ms_since(start);
    expect(elapsed < 60000, "took " + std::to_string(elapsed) + " ms");
    return std::to_string(trials) + " instances within 10%, " +
           std::to_string(elapsed) + " ms";
  });

  run(6, "model and optimizer invariants", [&] {
    std::mt19937_64 rng(424242);

    // Latencies and objectives never go negative.
    for (int trial = 0; trial < 40; ++trial) {
      const RandomInstance inst = random_instance(rng, 6, 10, 4);
      for (const Edge& edge : inst.graph.edges) {
        expect(edge_latency(inst.graph, inst.topo, inst.placement,
                            inst.params, edge.from, edge.to)
                       .latency >= 0.0,
               "negative edge latency");
      }
      const double total = total_latency(inst.graph, inst.topo,
                                         inst.placement, inst.params);
      expect(total >= 0.0, "negative total latency");
      expect(objective_f(total, inst.params) >= 0.0, "negative objective");
    }

    // Free communication collapses latency to the link overhead alone.
    for (int trial = 0; trial < 20; ++trial) {
      RandomInstance inst = random_instance(rng, 5, 8, 3);
      for (auto& row : inst.topo.com_cost) row.assign(row.size(), 0.0);
      inst.params.alpha = 0.0;
      expect(total_latency(inst.graph, inst.topo, inst.placement,
                           inst.params) == 0.0,
             "zero-cost latency must be exactly zero");
      inst.params.alpha = 0.3;
      for (const Edge& edge : inst.graph.edges) {
        const auto breakdown =
            edge_latency(inst.graph, inst.topo, inst.placement, inst.params,
                         edge.from, edge.to);
        expect(breakdown.latency == 0.3 * breakdown.enabled_links,
               "zero-cost edge latency must equal the link overhead");
      }
    }

    // Doubling com_cost doubles latency exactly and keeps the brute-force
    // argmin (ties and all) unchanged.
    for (int trial = 0; trial < 12; ++trial) {
      RandomInstance inst = random_instance(rng, 3, 3, 3);
      inst.params.alpha = 0.0;
      RandomInstance scaled = inst;
      for (auto& row : scaled.topo.com_cost) {
        for (double& c : row) c *= 2.0;
      }
      for (const Edge& edge : inst.graph.edges) {
        const double base =
            edge_latency(inst.graph, inst.topo, inst.placement, inst.params,
                         edge.from, edge.to)
                .latency;
        const double doubled =
            edge_latency(scaled.graph, scaled.topo, scaled.placement,
                         scaled.params, edge.from, edge.to)
                .latency;
        expect(doubled == 2.0 * base, "scaling must be exact");
      }
      OptimizerConfig config;
      config.granularity = 3;
      const auto base_opt = brute_force_optimize(inst.graph, inst.topo,
                                                 inst.params, nullptr, config);
      const auto scaled_opt = brute_force_optimize(scaled.graph, scaled.topo,
                                                   scaled.params, nullptr,
                                                   config);
      expect(base_opt.placement.fractions == scaled_opt.placement.fractions,
             "scaling must not move the argmin");
      expect(scaled_opt.objective == 2.0 * base_opt.objective,
             "objective must scale with the costs");
    }

    // Raising alpha never lowers an edge latency or the total.
    for (int trial = 0; trial < 20; ++trial) {
      RandomInstance inst = random_instance(rng, 5, 8, 4);
      ModelParams higher = inst.params;
      higher.alpha = inst.params.alpha + 0.1;
      for (const Edge& edge : inst.graph.edges) {
        expect(edge_latency(inst.graph, inst.topo, inst.placement, higher,
                            edge.from, edge.to)
                       .latency >=
                   edge_latency(inst.graph, inst.topo, inst.placement,
                                inst.params, edge.from, edge.to)
                       .latency,
               "alpha must not reduce edge latency");
      }
      expect(total_latency(inst.graph, inst.topo, inst.placement, higher) >=
                 total_latency(inst.graph, inst.topo, inst.placement,
                               inst.params),
             "alpha must not reduce total latency");
    }

    // The objective collapses to plain latency when either beta or the
    // checked fraction is zero.
    for (double latency : {0.0, 0.5, 1.74, 12.25}) {
      ModelParams params;
      params.beta = 0.0;
      params.dq_fraction = 0.7;
      expect(objective_f(latency, params) == latency,
             "beta 0 must leave latency untouched");
      params.beta = 1.7;
      params.dq_fraction = 0.0;
      expect(objective_f(latency, params) == latency,
             "dq 0 must leave latency untouched");
    }

    // Swapping two devices everywhere relabels the problem; with the fixed
    // ascending summation order a two-device swap is bit-exact.
    for (int trial = 0; trial < 20; ++trial) {
      const RandomInstance inst = random_instance(rng, 5, 8, 2);
      RandomInstance swapped = inst;
      for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
          swapped.topo.com_cost[u][v] = inst.topo.com_cost[1 - u][1 - v];
        }
      }
      for (std::size_t i = 0; i < inst.placement.fractions.size(); ++i) {
        swapped.topo.availability[i][0] = inst.topo.availability[i][1];
        swapped.topo.availability[i][1] = inst.topo.availability[i][0];
        swapped.placement.fractions[i][0] = inst.placement.fractions[i][1];
        swapped.placement.fractions[i][1] = inst.placement.fractions[i][0];
      }
      expect(total_latency(swapped.graph, swapped.topo, swapped.placement,
                           swapped.params) ==
                 total_latency(inst.graph, inst.topo, inst.placement,
                               inst.params),
             "device relabeling changed the latency");
    }

    // Placements survive a serialization round-trip bit for bit.
    for (int trial = 0; trial < 10; ++trial) {
      const RandomInstance inst = random_instance(rng, 5, 8, 4);
      const std::string text = placement_to_json(inst.placement).dump();
      const nlohmann::json doc = nlohmann::json::parse(text);
      Placement back;
      for (const auto& row : doc.at("placement")) {
        back.fractions.push_back(row.get<std::vector<double>>());
      }
      expect(back.fractions == inst.placement.fractions,
             "placement serialization must round-trip exactly");
    }

    // The same seed replays the same search.
    for (int trial = 0; trial < 3; ++trial) {
      const RandomInstance inst = random_instance(rng, 4, 6, 3);
      OptimizerConfig config;
      config.seed = 99 + trial;
      config.restarts = 4;
      config.max_iterations = 80;
      const auto a = local_search_optimize(inst.graph, inst.topo, inst.params,
                                           nullptr, config);
      const auto b = local_search_optimize(inst.graph, inst.topo, inst.params,
                                           nullptr, config);
      expect(a.objective == b.objective &&
                 a.placement.fractions == b.placement.fractions,
             "same seed must replay the same result");
    }

    return std::string("8 property suites");
  });

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
