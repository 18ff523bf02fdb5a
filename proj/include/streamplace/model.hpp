#pragma once

#include "streamplace/types.hpp"
#include "streamplace/validation.hpp"

namespace streamplace {

// Number of cross-device links an edge (from_op, to_op) keeps open under the
// given placement. Pairs mode counts ordered device pairs (u, v) with
// fractions[from][u] != 0, fractions[to][v] != 0 and u != v; Devices mode
// counts the distinct devices appearing in at least one such pair.
// Throws EdgeNotFoundError if the edge is not in the graph.
int enabled_links(const OperatorGraph& graph, const Placement& placement,
                  int from_op, int to_op, LinkCountMode mode);

// Latency of one DAG edge. per_device_cost[u] =
//   batch_size * fractions[from][u] * selectivity(from)
//     * sum_v com_cost[u][v] * fractions[to][v]
// with the inner sum taken in ascending device index. The edge latency is the
// maximum entry over the sending operator's available devices (0 if that set
// has no mass) plus alpha * enabled_links.
// Throws EdgeNotFoundError / ShapeError.
EdgeLatencyBreakdown edge_latency(const OperatorGraph& graph,
                                  const DeviceTopology& topo,
                                  const Placement& placement,
                                  const ModelParams& params, int from_op,
                                  int to_op);

// Scalarized objective: latency / (1 + beta * dq_fraction). The denominator
// is >= 1 for any parameters satisfying the ModelParams invariants.
double objective_f(double latency, const ModelParams& params);

// Checks row sums (1 within kRowSumTolerance), nonnegative entries, mass on
// unavailable devices and dimension agreement. Violations are reported, not
// thrown.
ValidationReport validate_placement(const Placement& placement,
                                    const OperatorGraph& graph,
                                    const DeviceTopology& topo);

// Checks com_cost entries >= 0, per-operator availability nonempty and
// dimensions. A nonzero com_cost diagonal entry is reported as a warning.
ValidationReport validate_topology(const DeviceTopology& topo,
                                   int operator_count);

// Total cross-device data volume: sum over edges (i, j) and device pairs
// u != v of fractions[i][u] * selectivity(i) * fractions[j][v]. Reported
// alongside latency; never an optimization target.
double network_volume(const OperatorGraph& graph, const DeviceTopology& topo,
                      const Placement& placement);

}  // namespace streamplace
