#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamplace/bundle.hpp"
#include "streamplace/graph.hpp"
#include "streamplace/model.hpp"
#include "streamplace/optimize.hpp"

namespace {

using nlohmann::json;
using namespace streamplace;

std::string human(double value) { return format_double(value, 4); }

std::string node_chain(const DagPath& path) {
  if (path.edges.empty()) return "(empty)";
  std::string out = std::to_string(path.edges.front().from);
  for (const Edge& e : path.edges) {
    out += " -> ";
    out += std::to_string(e.to);
  }
  return out;
}

std::string row_text(const std::vector<double>& row) {
  std::string out = "[";
  for (std::size_t u = 0; u < row.size(); ++u) {
    if (u > 0) out += ", ";
    out += human(row[u]);
  }
  return out + "]";
}

json placement_rows(const Placement& placement) {
  return json(placement.fractions);
}

const Placement& require_placement(const ProblemBundle& bundle,
                                   const char* command) {
  if (!bundle.placement.has_value()) {
    throw std::invalid_argument(std::string(command) +
                                " requires a placement in the input file");
  }
  return *bundle.placement;
}

int cmd_evaluate(const ProblemBundle& bundle, const std::string& format) {
  const Placement& placement = require_placement(bundle, "evaluate");
  const CandidateEvaluation eval =
      evaluate_candidate(bundle.graph, bundle.topology, placement,
                         bundle.params);
  const CriticalPathResult critical =
      critical_path(bundle.graph, bundle.topology, placement, bundle.params);

  if (format == "json") {
    json edges = json::array();
    for (const Edge& e : bundle.graph.edges) {
      const EdgeLatencyBreakdown breakdown =
          edge_latency(bundle.graph, bundle.topology, placement,
                       bundle.params, e.from, e.to);
      edges.push_back({{"from", e.from},
                       {"to", e.to},
                       {"latency", breakdown.latency},
                       {"enabled_links", breakdown.enabled_links},
                       {"per_device_cost", breakdown.per_device_cost}});
    }
    json critical_nodes = json::array();
    if (!critical.path.edges.empty()) {
      critical_nodes.push_back(critical.path.edges.front().from);
      for (const Edge& e : critical.path.edges) critical_nodes.push_back(e.to);
    }
    const json doc = {{"edges", edges},
                      {"critical_path", critical_nodes},
                      {"latency", eval.latency},
                      {"objective", eval.objective},
                      {"network_volume", eval.network_volume}};
    std::cout << doc.dump(2) << '\n';
    return 0;
  }

  for (const Edge& e : bundle.graph.edges) {
    const EdgeLatencyBreakdown breakdown =
        edge_latency(bundle.graph, bundle.topology, placement, bundle.params,
                     e.from, e.to);
    std::cout << "edge " << e.from << " -> " << e.to << ": latency "
              << human(breakdown.latency) << ", enabled links "
              << breakdown.enabled_links << ", per-device "
              << row_text(breakdown.per_device_cost) << '\n';
  }
  std::cout << "critical path: " << node_chain(critical.path) << '\n';
  std::cout << "latency: " << human(eval.latency) << '\n';
  std::cout << "objective: " << human(eval.objective) << " (beta "
            << human(bundle.params.beta) << ", dq_fraction "
            << human(bundle.params.dq_fraction) << ")\n";
  std::cout << "network volume: " << human(eval.network_volume) << '\n';
  return 0;
}

int cmd_optimize(const ProblemBundle& bundle, OptimizeMethod method,
                 const OptimizerConfig& config, const std::string& format,
                 const std::string& out_path) {
  OptimizationResult result;
  if (bundle.scenario.has_value()) {
    result = optimize_with_dq(bundle.graph, bundle.topology, bundle.params,
                              *bundle.scenario, config, method);
  } else if (method == OptimizeMethod::BruteForce) {
    result = brute_force_optimize(bundle.graph, bundle.topology,
                                  bundle.params, nullptr, config);
  } else {
    result = local_search_optimize(bundle.graph, bundle.topology,
                                   bundle.params, nullptr, config);
  }

  if (!out_path.empty()) save_placement(result.placement, out_path);

  const std::string method_label =
      result.method == OptimizeMethod::BruteForce ? "brute_force"
                                                  : "local_search";
  if (format == "json") {
    json doc = {{"method", method_label},
                {"dq_fraction", result.dq_fraction},
                {"latency", result.latency},
                {"objective", result.objective},
                {"evaluations", result.evaluations},
                {"placement", placement_rows(result.placement)}};
    if (result.level_index >= 0) doc["level_index"] = result.level_index;
    std::cout << doc.dump(2) << '\n';
    return 0;
  }

  std::cout << "method: " << method_label << '\n';
  if (result.level_index >= 0) {
    std::cout << "scenario level: " << result.level_index << '\n';
  }
  std::cout << "dq_fraction: " << human(result.dq_fraction) << '\n';
  std::cout << "latency: " << human(result.latency) << '\n';
  std::cout << "objective: " << human(result.objective) << '\n';
  std::cout << "evaluations: " << result.evaluations << '\n';
  std::cout << "placement:\n";
  for (std::size_t i = 0; i < result.placement.fractions.size(); ++i) {
    std::cout << "  operator " << i << ": "
              << row_text(result.placement.fractions[i]) << '\n';
  }
  return 0;
}

int cmd_sweep(const ProblemBundle& bundle, const std::vector<double>& betas,
              const std::vector<double>& dqs,
              std::optional<OptimizeMethod> method,
              const OptimizerConfig& config, const std::string& format,
              const std::string& out_path) {
  const std::vector<SweepRow> rows =
      run_sweep(bundle, betas, dqs, method, config);
  const std::string csv = sweep_csv(rows);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw BundleError("cannot write " + out_path);
    out << csv;
  }
  if (format == "human") {
    std::cout << "beta     dq_fraction  latency   objective  method\n";
    for (const SweepRow& row : rows) {
      std::cout << human(row.beta) << '\t' << human(row.dq_fraction) << '\t'
                << human(row.latency) << '\t' << human(row.objective) << '\t'
                << row.method << '\n';
    }
  } else {
    std::cout << csv;
  }
  return 0;
}

int cmd_paths(const ProblemBundle& bundle, std::uint64_t cap,
              const std::string& format) {
  const std::vector<DagPath> paths = enumerate_paths(bundle.graph, cap);
  const bool with_latency = bundle.placement.has_value();
  std::optional<CriticalPathResult> critical;
  if (with_latency) {
    critical = critical_path(bundle.graph, bundle.topology, *bundle.placement,
                             bundle.params);
  }

  if (format == "json") {
    json out = json::array();
    for (const DagPath& path : paths) {
      json nodes = json::array();
      nodes.push_back(path.edges.front().from);
      for (const Edge& e : path.edges) nodes.push_back(e.to);
      json entry = {{"nodes", nodes}};
      if (with_latency) {
        entry["latency"] = path_latency(path, bundle.graph, bundle.topology,
                                        *bundle.placement, bundle.params);
        entry["critical"] = path.edges == critical->path.edges;
      }
      out.push_back(std::move(entry));
    }
    std::cout << json{{"paths", out}}.dump(2) << '\n';
    return 0;
  }

  for (const DagPath& path : paths) {
    std::cout << "path " << node_chain(path);
    if (with_latency) {
      std::cout << ": latency "
                << human(path_latency(path, bundle.graph, bundle.topology,
                                      *bundle.placement, bundle.params));
      if (path.edges == critical->path.edges) std::cout << " [critical]";
    }
    std::cout << '\n';
  }
  std::cout << paths.size() << " path" << (paths.size() == 1 ? "" : "s")
            << '\n';
  return 0;
}

int cmd_validate(const std::string& input) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "cannot open " << input << '\n';
    return 1;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    std::cerr << input << ": " << err.what() << '\n';
    return 1;
  }
  ProblemBundle bundle;
  try {
    bundle = parse_bundle(doc);
  } catch (const BundleError& err) {
    std::cerr << input << ": " << err.what() << '\n';
    return 1;
  }
  const ValidationReport report = validate_bundle(bundle);
  if (report.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  std::cout << report.to_string();
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality-aware cost model and placement optimizer for "
               "streaming dataflows"};
  app.require_subcommand(1);

  std::string input;
  std::string format = "human";
  std::string method_name = "brute";
  std::string out_path;
  std::vector<double> betas;
  std::vector<double> dqs;
  std::uint64_t path_cap = kDefaultPathCap;
  OptimizerConfig config;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input,-i", input, "Problem bundle (JSON)")
        ->required();
  };
  auto add_optimizer_flags = [&](CLI::App* cmd) {
    cmd->add_option("--granularity", config.granularity,
                    "Grid resolution: fractions are multiples of 1/g");
    cmd->add_option("--seed", config.seed, "Random seed for local search");
    cmd->add_option("--restarts", config.restarts, "Local search restarts");
    cmd->add_option("--iterations", config.max_iterations,
                    "Proposals per restart");
    cmd->add_option("--move-step", config.move_step,
                    "Mass shifted per proposal");
    cmd->add_option("--temperature", config.initial_temperature,
                    "Initial annealing temperature (0 disables)");
    cmd->add_option("--cooling", config.cooling,
                    "Temperature decay per proposal");
    cmd->add_flag("--grid-moves", config.grid_moves,
                  "Keep local search on the 1/granularity grid");
    cmd->add_option("--max-candidates", config.max_candidates,
                    "Brute-force candidate limit");
  };

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Evaluate the bundle placement under the cost model");
  add_input(evaluate);
  evaluate->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"human", "json"}));

  CLI::App* optimize = app.add_subcommand(
      "optimize", "Search for a placement minimizing the objective");
  add_input(optimize);
  optimize->add_option("--method", method_name, "Search method")
      ->check(CLI::IsMember({"brute", "local"}));
  add_optimizer_flags(optimize);
  optimize->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"human", "json"}));
  optimize->add_option("--out", out_path, "Write the placement as JSON");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Tabulate latency and objective across beta and dq values");
  add_input(sweep);
  sweep->add_option("--beta", betas, "Beta values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--dq", dqs,
                    "dq_fraction values (defaults to the bundle scenario)")
      ->delimiter(',');
  std::string sweep_method;
  sweep->add_option("--method", sweep_method,
                    "Re-optimize per combination instead of evaluating the "
                    "fixed placement")
      ->check(CLI::IsMember({"brute", "local"}));
  add_optimizer_flags(sweep);
  std::string sweep_format = "csv";
  sweep->add_option("--format", sweep_format, "Output format")
      ->check(CLI::IsMember({"human", "csv"}));
  sweep->add_option("--out", out_path, "Write the CSV to a file");

  CLI::App* paths = app.add_subcommand(
      "paths", "List source-to-sink paths with their latencies");
  add_input(paths);
  paths->add_option("--cap", path_cap, "Refuse to enumerate more paths");
  paths->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"human", "json"}));

  CLI::App* validate = app.add_subcommand(
      "validate", "Check a bundle and print all diagnostics");
  add_input(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(input);
    const ProblemBundle bundle = load_bundle(input);
    if (app.got_subcommand(evaluate)) return cmd_evaluate(bundle, format);
    if (app.got_subcommand(optimize)) {
      const OptimizeMethod method = method_name == "local"
                                        ? OptimizeMethod::LocalSearch
                                        : OptimizeMethod::BruteForce;
      return cmd_optimize(bundle, method, config, format, out_path);
    }
    if (app.got_subcommand(sweep)) {
      std::optional<OptimizeMethod> method;
      if (sweep_method == "brute") method = OptimizeMethod::BruteForce;
      if (sweep_method == "local") method = OptimizeMethod::LocalSearch;
      return cmd_sweep(bundle, betas, dqs, method, config, sweep_format,
                       out_path);
    }
    if (app.got_subcommand(paths)) return cmd_paths(bundle, path_cap, format);
  } catch (const SearchSpaceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PathExplosionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
