#pragma once

#include <cstdint>
#include <vector>

#include "streamplace/types.hpp"
#include "streamplace/validation.hpp"

namespace streamplace {

// A source-to-sink walk stored as its edge sequence; consecutive edges chain
// (edges[k].to == edges[k+1].from). Empty only for graphs without edges.
struct DagPath {
  std::vector<Edge> edges;

  bool operator==(const DagPath&) const = default;
};

inline constexpr std::uint64_t kDefaultPathCap = 1'000'000;

// Reports cycles (with a witness), dangling edge endpoints, duplicate edges,
// sources whose selectivity != 1, negative selectivities and the absence of
// a source or sink.
ValidationReport validate_graph(const OperatorGraph& graph);

// Number of source-to-sink paths, saturated at cap + 1.
std::uint64_t count_paths(const OperatorGraph& graph,
                          std::uint64_t cap = kDefaultPathCap);

// All source-to-sink edge sequences in lexicographic order of their node
// sequences. Throws PathExplosionError when the path count exceeds cap.
std::vector<DagPath> enumerate_paths(const OperatorGraph& graph,
                                     std::uint64_t cap = kDefaultPathCap);

struct CriticalPathResult {
  double latency = 0.0;
  DagPath path;  // lexicographically smallest witness among the maximizers
};

// Latency of a path: edge latencies summed back-to-front (the fold runs from
// the sink-side edge toward the source), matching the order used by
// critical_path so the two routes agree bit for bit.
double path_latency(const DagPath& path, const OperatorGraph& graph,
                    const DeviceTopology& topo, const Placement& placement,
                    const ModelParams& params);

// Longest source-to-sink path under per-edge latencies, computed by dynamic
// programming over a topological order. Edge weights do not depend on the
// path they sit on, so the DP is exact. A graph without edges yields
// latency 0 and an empty witness.
CriticalPathResult critical_path(const OperatorGraph& graph,
                                 const DeviceTopology& topo,
                                 const Placement& placement,
                                 const ModelParams& params);

// The latency component of critical_path.
double total_latency(const OperatorGraph& graph, const DeviceTopology& topo,
                     const Placement& placement, const ModelParams& params);

}  // namespace streamplace
