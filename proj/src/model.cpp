#include "streamplace/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamplace {

bool OperatorGraph::has_edge(int from, int to) const {
  return std::find(edges.begin(), edges.end(), Edge{from, to}) != edges.end();
}

std::vector<int> OperatorGraph::out_neighbors(int op) const {
  std::vector<int> result;
  for (const Edge& e : edges) {
    if (e.from == op) result.push_back(e.to);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<int> OperatorGraph::sources() const {
  std::vector<bool> has_in(operators.size(), false);
  for (const Edge& e : edges) {
    if (e.to >= 0 && e.to < operator_count()) has_in[e.to] = true;
  }
  std::vector<int> result;
  for (int i = 0; i < operator_count(); ++i) {
    if (!has_in[i]) result.push_back(i);
  }
  return result;
}

std::vector<int> OperatorGraph::sinks() const {
  std::vector<bool> has_out(operators.size(), false);
  for (const Edge& e : edges) {
    if (e.from >= 0 && e.from < operator_count()) has_out[e.from] = true;
  }
  std::vector<int> result;
  for (int i = 0; i < operator_count(); ++i) {
    if (!has_out[i]) result.push_back(i);
  }
  return result;
}

namespace {

void require_edge(const OperatorGraph& graph, int from_op, int to_op) {
  if (!graph.has_edge(from_op, to_op)) {
    throw EdgeNotFoundError("no edge " + std::to_string(from_op) + " -> " +
                            std::to_string(to_op) + " in the operator graph");
  }
}

void require_shapes(const OperatorGraph& graph, const DeviceTopology& topo,
                    const Placement& placement) {
  if (placement.operator_count() != graph.operator_count()) {
    throw ShapeError("placement has " +
                     std::to_string(placement.operator_count()) +
                     " rows but the graph has " +
                     std::to_string(graph.operator_count()) + " operators");
  }
  for (const auto& row : placement.fractions) {
    if (static_cast<int>(row.size()) != topo.device_count) {
      throw ShapeError("placement row has " + std::to_string(row.size()) +
                       " entries but the topology has " +
                       std::to_string(topo.device_count) + " devices");
    }
  }
  if (static_cast<int>(topo.com_cost.size()) != topo.device_count) {
    throw ShapeError("com_cost is not device_count x device_count");
  }
}

}  // namespace

int enabled_links(const OperatorGraph& graph, const Placement& placement,
                  int from_op, int to_op, LinkCountMode mode) {
  require_edge(graph, from_op, to_op);
  const auto& from_row = placement.fractions.at(from_op);
  const auto& to_row = placement.fractions.at(to_op);
  const int n = static_cast<int>(from_row.size());

  if (mode == LinkCountMode::Pairs) {
    int pairs = 0;
    for (int u = 0; u < n; ++u) {
      if (from_row[u] == 0.0) continue;
      for (int v = 0; v < n; ++v) {
        if (v != u && to_row[v] != 0.0) ++pairs;
      }
    }
    return pairs;
  }

  std::vector<bool> participates(n, false);
  for (int u = 0; u < n; ++u) {
    if (from_row[u] == 0.0) continue;
    for (int v = 0; v < n; ++v) {
      if (v != u && to_row[v] != 0.0) {
        participates[u] = true;
        participates[v] = true;
      }
    }
  }
  return static_cast<int>(
      std::count(participates.begin(), participates.end(), true));
}

EdgeLatencyBreakdown edge_latency(const OperatorGraph& graph,
                                  const DeviceTopology& topo,
                                  const Placement& placement,
                                  const ModelParams& params, int from_op,
                                  int to_op) {
  require_edge(graph, from_op, to_op);
  require_shapes(graph, topo, placement);

  const double selectivity = graph.operators.at(from_op).selectivity;
  const auto& from_row = placement.fractions[from_op];
  const auto& to_row = placement.fractions[to_op];

  EdgeLatencyBreakdown breakdown;
  breakdown.edge = Edge{from_op, to_op};
  breakdown.per_device_cost.assign(topo.device_count, 0.0);

  // All sums run in ascending device index.
  for (int u = 0; u < topo.device_count; ++u) {
    double transfer = 0.0;
    for (int v = 0; v < topo.device_count; ++v) {
      transfer += topo.com_cost[u][v] * to_row[v];
    }
    breakdown.per_device_cost[u] =
        params.batch_size * from_row[u] * selectivity * transfer;
  }

  double worst = 0.0;  // max over an empty or all-zero set is 0
  for (int u = 0; u < topo.device_count; ++u) {
    if (topo.availability[from_op][u]) {
      worst = std::max(worst, breakdown.per_device_cost[u]);
    }
  }

  breakdown.enabled_links =
      enabled_links(graph, placement, from_op, to_op, params.link_count_mode);
  breakdown.latency = worst + params.alpha * breakdown.enabled_links;
  return breakdown;
}

double objective_f(double latency, const ModelParams& params) {
  return latency / (1.0 + params.beta * params.dq_fraction);
}

ValidationReport validate_placement(const Placement& placement,
                                    const OperatorGraph& graph,
                                    const DeviceTopology& topo) {
  ValidationReport report;

  if (placement.operator_count() != graph.operator_count()) {
    report.add_error("dimension-mismatch",
                     "placement has " +
                         std::to_string(placement.operator_count()) +
                         " rows, expected " +
                         std::to_string(graph.operator_count()));
    return report;
  }

  for (int i = 0; i < placement.operator_count(); ++i) {
    const auto& row = placement.fractions[i];
    if (static_cast<int>(row.size()) != topo.device_count) {
      report.add_error("dimension-mismatch",
                       "operator " + std::to_string(i) + " row has " +
                           std::to_string(row.size()) + " entries, expected " +
                           std::to_string(topo.device_count));
      continue;
    }

    double sum = 0.0;
    bool any_support = false;
    for (int u = 0; u < topo.device_count; ++u) {
      const double x = row[u];
      sum += x;
      if (x != 0.0) any_support = true;
      if (x < 0.0) {
        report.add_error("negative-fraction",
                         "operator " + std::to_string(i) + " has fraction " +
                             std::to_string(x) + " on device " +
                             std::to_string(u));
      }
      if (x > 0.0 && i < static_cast<int>(topo.availability.size()) &&
          !topo.availability[i][u]) {
        report.add_error("unavailable-device",
                         "operator " + std::to_string(i) + " places " +
                             std::to_string(x) + " on unavailable device " +
                             std::to_string(u));
      }
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      report.add_error("row-sum", "operator " + std::to_string(i) +
                                      " fractions sum to " +
                                      std::to_string(sum) + ", expected 1");
    }
    if (!any_support) {
      report.add_error("zero-support", "operator " + std::to_string(i) +
                                           " has no device with mass");
    }
  }
  return report;
}

ValidationReport validate_topology(const DeviceTopology& topo,
                                   int operator_count) {
  ValidationReport report;
  const int n = topo.device_count;

  if (static_cast<int>(topo.com_cost.size()) != n) {
    report.add_error("dimension-mismatch",
                     "com_cost has " + std::to_string(topo.com_cost.size()) +
                         " rows, expected " + std::to_string(n));
    return report;
  }
  for (int u = 0; u < n; ++u) {
    if (static_cast<int>(topo.com_cost[u].size()) != n) {
      report.add_error("dimension-mismatch",
                       "com_cost row " + std::to_string(u) + " has " +
                           std::to_string(topo.com_cost[u].size()) +
                           " entries, expected " + std::to_string(n));
      continue;
    }
    for (int v = 0; v < n; ++v) {
      const double c = topo.com_cost[u][v];
      if (c < 0.0 || std::isnan(c)) {
        report.add_error("negative-com-cost",
                         "com_cost[" + std::to_string(u) + "][" +
                             std::to_string(v) + "] = " + std::to_string(c));
      }
    }
    if (topo.com_cost[u].size() == static_cast<std::size_t>(n) &&
        topo.com_cost[u][u] != 0.0) {
      report.add_warning("nonzero-diagonal",
                         "com_cost[" + std::to_string(u) + "][" +
                             std::to_string(u) + "] = " +
                             std::to_string(topo.com_cost[u][u]) +
                             "; self-transfer will be charged");
    }
  }

  if (static_cast<int>(topo.availability.size()) != operator_count) {
    report.add_error("dimension-mismatch",
                     "availability has " +
                         std::to_string(topo.availability.size()) +
                         " rows, expected " + std::to_string(operator_count));
    return report;
  }
  for (int i = 0; i < operator_count; ++i) {
    if (static_cast<int>(topo.availability[i].size()) != n) {
      report.add_error("dimension-mismatch",
                       "availability row " + std::to_string(i) + " has " +
                           std::to_string(topo.availability[i].size()) +
                           " entries, expected " + std::to_string(n));
      continue;
    }
    bool any = false;
    for (int u = 0; u < n; ++u) any = any || topo.availability[i][u];
    if (!any) {
      report.add_error("no-available-device",
                       "operator " + std::to_string(i) +
                           " has no available device");
    }
  }
  return report;
}

double network_volume(const OperatorGraph& graph, const DeviceTopology& topo,
                      const Placement& placement) {
  require_shapes(graph, topo, placement);
  double volume = 0.0;
  for (const Edge& e : graph.edges) {
    const double selectivity = graph.operators.at(e.from).selectivity;
    const auto& from_row = placement.fractions[e.from];
    const auto& to_row = placement.fractions[e.to];
    for (int u = 0; u < topo.device_count; ++u) {
      double cross = 0.0;
      for (int v = 0; v < topo.device_count; ++v) {
        if (v != u) cross += to_row[v];
      }
      volume += from_row[u] * selectivity * cross;
    }
  }
  return volume;
}

}  // namespace streamplace
