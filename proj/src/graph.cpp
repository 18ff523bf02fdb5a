#include "streamplace/graph.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "streamplace/model.hpp"

namespace streamplace {

namespace {

// Out-adjacency restricted to edges with in-range endpoints, ascending.
std::vector<std::vector<int>> adjacency(const OperatorGraph& graph) {
  const int n = graph.operator_count();
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : graph.edges) {
    if (e.from >= 0 && e.from < n && e.to >= 0 && e.to < n) {
      adj[e.from].push_back(e.to);
    }
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

// Reverse topological order (sinks first). Throws if the graph is cyclic.
std::vector<int> reverse_topological_order(
    const OperatorGraph& graph, const std::vector<std::vector<int>>& adj) {
  const int n = graph.operator_count();
  std::vector<int> in_degree(n, 0);
  for (int v = 0; v < n; ++v) {
    for (int w : adj[v]) ++in_degree[w];
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> ready;
  for (int v = n - 1; v >= 0; --v) {
    if (in_degree[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (int w : adj[v]) {
      if (--in_degree[w] == 0) ready.push_back(w);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::invalid_argument("operator graph is cyclic");
  }
  std::reverse(order.begin(), order.end());
  return order;
}

std::string path_to_string(const std::vector<int>& nodes) {
  std::string out;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k > 0) out += " -> ";
    out += std::to_string(nodes[k]);
  }
  return out;
}

}  // namespace

ValidationReport validate_graph(const OperatorGraph& graph) {
  ValidationReport report;
  const int n = graph.operator_count();

  if (n == 0) {
    report.add_error("empty-graph", "graph has no operators");
    return report;
  }

  for (int i = 0; i < n; ++i) {
    if (graph.operators[i].id != i) {
      report.add_error("bad-operator-id",
                       "operator at position " + std::to_string(i) +
                           " has id " + std::to_string(graph.operators[i].id));
    }
    if (graph.operators[i].selectivity < 0.0) {
      report.add_error("negative-selectivity",
                       "operator " + std::to_string(i) + " has selectivity " +
                           std::to_string(graph.operators[i].selectivity));
    }
  }

  std::map<std::pair<int, int>, int> seen;
  for (const Edge& e : graph.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      report.add_error("dangling-edge",
                       "edge " + std::to_string(e.from) + " -> " +
                           std::to_string(e.to) +
                           " references a nonexistent operator");
      continue;
    }
    if (++seen[{e.from, e.to}] == 2) {
      report.add_error("duplicate-edge", "edge " + std::to_string(e.from) +
                                             " -> " + std::to_string(e.to) +
                                             " appears more than once");
    }
    if (e.from == e.to) {
      report.add_error("cycle", "self-loop on operator " +
                                    std::to_string(e.from) + ": witness " +
                                    path_to_string({e.from, e.to}));
    }
  }

  // Cycle search: iterative DFS, ascending ids, first cycle wins.
  const auto adj = adjacency(graph);
  std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<int> stack_nodes;
  bool cycle_reported = false;
  for (int start = 0; start < n && !cycle_reported; ++start) {
    if (color[start] != 0) continue;
    std::vector<std::pair<int, std::size_t>> frames{{start, 0}};
    color[start] = 1;
    stack_nodes = {start};
    while (!frames.empty() && !cycle_reported) {
      auto& [v, next] = frames.back();
      if (next < adj[v].size()) {
        const int w = adj[v][next++];
        if (w == v) continue;  // self-loop already reported
        if (color[w] == 1) {
          auto it = std::find(stack_nodes.begin(), stack_nodes.end(), w);
          std::vector<int> witness(it, stack_nodes.end());
          witness.push_back(w);
          report.add_error("cycle", "cycle detected: witness " +
                                        path_to_string(witness));
          cycle_reported = true;
        } else if (color[w] == 0) {
          color[w] = 1;
          stack_nodes.push_back(w);
          frames.push_back({w, 0});
        }
      } else {
        color[v] = 2;
        stack_nodes.pop_back();
        frames.pop_back();
      }
    }
  }

  const auto source_ids = graph.sources();
  const auto sink_ids = graph.sinks();
  if (source_ids.empty()) {
    report.add_error("no-source", "graph has no source operator");
  }
  if (sink_ids.empty()) {
    report.add_error("no-sink", "graph has no sink operator");
  }
  for (int s : source_ids) {
    if (graph.operators[s].selectivity != 1.0) {
      report.add_error("source-selectivity",
                       "source operator " + std::to_string(s) +
                           " has selectivity " +
                           std::to_string(graph.operators[s].selectivity) +
                           ", expected 1");
    }
  }
  return report;
}

std::uint64_t count_paths(const OperatorGraph& graph, std::uint64_t cap) {
  const auto adj = adjacency(graph);
  const auto order = reverse_topological_order(graph, adj);
  const std::uint64_t limit = cap < UINT64_MAX ? cap + 1 : cap;

  std::vector<std::uint64_t> count(graph.operator_count(), 0);
  for (int v : order) {
    if (adj[v].empty()) {
      count[v] = 1;
      continue;
    }
    std::uint64_t total = 0;
    for (int w : adj[v]) {
      total += count[w];
      if (total >= limit) {
        total = limit;
        break;
      }
    }
    count[v] = total;
  }

  std::uint64_t total = 0;
  for (int s : graph.sources()) {
    if (!adj[s].empty()) {  // a zero-edge walk is not an enumerable path
      total += count[s];
      if (total >= limit) return limit;
    }
  }
  return total;
}

std::vector<DagPath> enumerate_paths(const OperatorGraph& graph,
                                     std::uint64_t cap) {
  const std::uint64_t total = count_paths(graph, cap);
  if (total > cap) {
    throw PathExplosionError(
        "path count exceeds cap " + std::to_string(cap) +
            "; use the critical-path computation instead of enumeration",
        total);
  }

  const auto adj = adjacency(graph);
  std::vector<DagPath> paths;
  std::vector<Edge> walk;

  // Ascending sources with ascending neighbors yields lexicographic order.
  auto descend = [&](auto&& self, int v) -> void {
    if (adj[v].empty()) {
      if (!walk.empty()) paths.push_back(DagPath{walk});
      return;
    }
    for (int w : adj[v]) {
      walk.push_back(Edge{v, w});
      self(self, w);
      walk.pop_back();
    }
  };
  for (int s : graph.sources()) descend(descend, s);
  return paths;
}

namespace {

std::map<std::pair<int, int>, double> edge_weights(
    const OperatorGraph& graph, const DeviceTopology& topo,
    const Placement& placement, const ModelParams& params) {
  std::map<std::pair<int, int>, double> weights;
  for (const Edge& e : graph.edges) {
    weights[{e.from, e.to}] =
        edge_latency(graph, topo, placement, params, e.from, e.to).latency;
  }
  return weights;
}

}  // namespace

double path_latency(const DagPath& path, const OperatorGraph& graph,
                    const DeviceTopology& topo, const Placement& placement,
                    const ModelParams& params) {
  double acc = 0.0;
  for (auto it = path.edges.rbegin(); it != path.edges.rend(); ++it) {
    acc = edge_latency(graph, topo, placement, params, it->from, it->to)
              .latency +
          acc;
  }
  return acc;
}

CriticalPathResult critical_path(const OperatorGraph& graph,
                                 const DeviceTopology& topo,
                                 const Placement& placement,
                                 const ModelParams& params) {
  const auto adj = adjacency(graph);
  const auto order = reverse_topological_order(graph, adj);
  const auto weights = edge_weights(graph, topo, placement, params);

  // dist[v]: largest back-to-front edge-latency sum from v down to a sink.
  std::vector<double> dist(graph.operator_count(), 0.0);
  for (int v : order) {
    double best = 0.0;
    bool first = true;
    for (int w : adj[v]) {
      const double candidate = weights.at({v, w}) + dist[w];
      if (first || candidate > best) {
        best = candidate;
        first = false;
      }
    }
    dist[v] = adj[v].empty() ? 0.0 : best;
  }

  CriticalPathResult result;
  const auto source_ids = graph.sources();
  if (source_ids.empty()) return result;

  int start = source_ids.front();
  for (int s : source_ids) {
    if (dist[s] > dist[start]) start = s;
  }
  result.latency = dist[start];

  // Greedy reconstruction: at each node take the smallest successor that
  // still attains dist, giving the lexicographically smallest witness.
  int v = start;
  while (!adj[v].empty()) {
    int next = -1;
    for (int w : adj[v]) {
      if (weights.at({v, w}) + dist[w] == dist[v]) {
        next = w;
        break;
      }
    }
    if (next < 0) break;  // unreachable: dist[v] equals one of the candidates
    result.path.edges.push_back(Edge{v, next});
    v = next;
  }
  return result;
}

double total_latency(const OperatorGraph& graph, const DeviceTopology& topo,
                     const Placement& placement, const ModelParams& params) {
  return critical_path(graph, topo, placement, params).latency;
}

}  // namespace streamplace
