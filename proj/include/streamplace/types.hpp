#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace streamplace {

// A node of the analytics DAG: a pipelined group of job steps that can be
// partitioned across devices. selectivity = output tuples per input tuple;
// sources must carry selectivity 1, sink selectivity is never read.
struct Operator {
  int id = 0;
  double selectivity = 1.0;
};

// Directed edge (data shuffle) between two operators.
struct Edge {
  int from = 0;
  int to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct OperatorGraph {
  std::vector<Operator> operators;  // ids are the 0-based positions
  std::vector<Edge> edges;

  int operator_count() const { return static_cast<int>(operators.size()); }
  bool has_edge(int from, int to) const;
  std::vector<int> out_neighbors(int op) const;  // ascending
  std::vector<int> sources() const;              // no in-edges, ascending
  std::vector<int> sinks() const;                // no out-edges, ascending
};

// Device pool with pairwise communication costs and per-operator permissions.
// com_cost[u][v] is the time to move one unit of data from u to v; asymmetric
// matrices are legal and the diagonal may be nonzero.
struct DeviceTopology {
  int device_count = 0;
  std::vector<std::vector<double>> com_cost;    // [sender][receiver]
  std::vector<std::vector<bool>> availability;  // [operator][device]
};

// Fractional assignment: fractions[i][u] is the share of operator i's tuples
// processed on device u. Rows sum to 1 within 1e-9; mass is only allowed on
// available devices.
struct Placement {
  std::vector<std::vector<double>> fractions;

  int operator_count() const { return static_cast<int>(fractions.size()); }
  int device_count() const {
    return fractions.empty() ? 0 : static_cast<int>(fractions.front().size());
  }
};

inline constexpr double kRowSumTolerance = 1e-9;

// How enabled_links counts the cross-device traffic of an edge:
// Pairs counts sender/receiver pairs, Devices counts distinct participants.
enum class LinkCountMode { Pairs, Devices };

struct ModelParams {
  double alpha = 0.0;        // overhead per enabled link
  double beta = 0.0;         // weight of data quality in the objective
  double dq_fraction = 0.0;  // share of input subjected to quality checks
  LinkCountMode link_count_mode = LinkCountMode::Pairs;
  double batch_size = 1.0;   // units of data per source batch
};

// Per-edge latency decomposition. latency = max(per_device_cost) over the
// sending operator's available devices, plus alpha * enabled_links.
struct EdgeLatencyBreakdown {
  Edge edge;
  std::vector<double> per_device_cost;  // indexed by sending device
  int enabled_links = 0;
  double latency = 0.0;
};

class EdgeNotFoundError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidCandidateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PathExplosionError : public std::runtime_error {
 public:
  PathExplosionError(const std::string& what, std::uint64_t count)
      : std::runtime_error(what), path_count(count) {}
  std::uint64_t path_count;
};

class SearchSpaceError : public std::runtime_error {
 public:
  SearchSpaceError(const std::string& what, std::uint64_t count)
      : std::runtime_error(what), candidate_count(count) {}
  std::uint64_t candidate_count;
};

class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace streamplace
