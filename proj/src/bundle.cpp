#include "streamplace/bundle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "streamplace/graph.hpp"
#include "streamplace/model.hpp"

namespace streamplace {

namespace {

using nlohmann::json;

const json& require_field(const json& doc, const char* name) {
  const auto it = doc.find(name);
  if (it == doc.end()) {
    throw BundleError(std::string("missing field '") + name + "'");
  }
  return *it;
}

double require_number(const json& value, const std::string& where) {
  if (!value.is_number()) {
    throw BundleError(where + ": expected a number, got " +
                      std::string(value.type_name()));
  }
  return value.get<double>();
}

int require_int(const json& value, const std::string& where) {
  if (!value.is_number_integer()) {
    throw BundleError(where + ": expected an integer, got " +
                      std::string(value.type_name()));
  }
  return value.get<int>();
}

const json& require_array(const json& value, const std::string& where) {
  if (!value.is_array()) {
    throw BundleError(where + ": expected an array, got " +
                      std::string(value.type_name()));
  }
  return value;
}

std::vector<std::vector<double>> parse_matrix(const json& value,
                                              const std::string& where) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < require_array(value, where).size(); ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    const json& row = require_array(value[r], row_where);
    std::vector<double> parsed;
    parsed.reserve(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
      parsed.push_back(
          require_number(row[c], row_where + "[" + std::to_string(c) + "]"));
    }
    out.push_back(std::move(parsed));
  }
  return out;
}

Placement parse_placement(const json& value, const std::string& where) {
  Placement out;
  out.fractions = parse_matrix(value, where);
  return out;
}

LinkCountMode parse_link_count_mode(const json& value) {
  if (!value.is_string()) {
    throw BundleError("params.link_count_mode: expected a string");
  }
  const std::string mode = value.get<std::string>();
  if (mode == "pairs") return LinkCountMode::Pairs;
  if (mode == "devices") return LinkCountMode::Devices;
  throw BundleError("params.link_count_mode: expected \"pairs\" or "
                    "\"devices\", got \"" +
                    mode + "\"");
}

DqScenario parse_scenario(const json& value) {
  DqScenario scenario;
  const json& levels = require_array(value, "scenario");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const std::string where = "scenario[" + std::to_string(l) + "]";
    const json& entry = levels[l];
    if (!entry.is_object()) {
      throw BundleError(where + ": expected an object");
    }
    DqLevel level;
    level.dq_fraction =
        require_number(require_field(entry, "dq_fraction"),
                       where + ".dq_fraction");
    if (entry.contains("caps")) {
      const json& caps = require_array(entry["caps"], where + ".caps");
      for (std::size_t c = 0; c < caps.size(); ++c) {
        const std::string cap_where =
            where + ".caps[" + std::to_string(c) + "]";
        const json& cap = caps[c];
        if (!cap.is_object()) {
          throw BundleError(cap_where + ": expected an object");
        }
        FractionCap parsed;
        parsed.op = require_int(require_field(cap, "op"), cap_where + ".op");
        parsed.device =
            require_int(require_field(cap, "device"), cap_where + ".device");
        parsed.max_fraction = require_number(
            require_field(cap, "max_fraction"), cap_where + ".max_fraction");
        level.caps.push_back(parsed);
      }
    }
    if (entry.contains("placement")) {
      level.placement =
          parse_placement(entry["placement"], where + ".placement");
    }
    scenario.levels.push_back(std::move(level));
  }
  return scenario;
}

}  // namespace

ProblemBundle parse_bundle(const json& doc) {
  if (!doc.is_object()) {
    throw BundleError("bundle root: expected an object");
  }
  ProblemBundle bundle;

  const json& operators = require_array(require_field(doc, "operators"),
                                        "operators");
  for (std::size_t i = 0; i < operators.size(); ++i) {
    const std::string where = "operators[" + std::to_string(i) + "]";
    const json& entry = operators[i];
    if (!entry.is_object()) {
      throw BundleError(where + ": expected an object");
    }
    Operator op;
    op.id = require_int(require_field(entry, "id"), where + ".id");
    op.selectivity = require_number(require_field(entry, "selectivity"),
                                    where + ".selectivity");
    bundle.graph.operators.push_back(op);
  }

  const json& edges = require_array(require_field(doc, "edges"), "edges");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string where = "edges[" + std::to_string(e) + "]";
    const json& pair = require_array(edges[e], where);
    if (pair.size() != 2) {
      throw BundleError(where + ": expected [from, to]");
    }
    bundle.graph.edges.push_back(Edge{require_int(pair[0], where + "[0]"),
                                      require_int(pair[1], where + "[1]")});
  }

  bundle.topology.com_cost =
      parse_matrix(require_field(doc, "com_cost"), "com_cost");
  bundle.topology.device_count =
      static_cast<int>(bundle.topology.com_cost.size());

  const json& availability = require_array(require_field(doc, "availability"),
                                           "availability");
  for (std::size_t i = 0; i < availability.size(); ++i) {
    const std::string where = "availability[" + std::to_string(i) + "]";
    const json& row = require_array(availability[i], where);
    std::vector<bool> parsed;
    for (std::size_t u = 0; u < row.size(); ++u) {
      if (!row[u].is_boolean()) {
        throw BundleError(where + "[" + std::to_string(u) +
                          "]: expected a boolean");
      }
      parsed.push_back(row[u].get<bool>());
    }
    bundle.topology.availability.push_back(std::move(parsed));
  }

  if (doc.contains("params")) {
    const json& params = doc["params"];
    if (!params.is_object()) {
      throw BundleError("params: expected an object");
    }
    if (params.contains("alpha")) {
      bundle.params.alpha = require_number(params["alpha"], "params.alpha");
    }
    if (params.contains("beta")) {
      bundle.params.beta = require_number(params["beta"], "params.beta");
    }
    if (params.contains("dq_fraction")) {
      bundle.params.dq_fraction =
          require_number(params["dq_fraction"], "params.dq_fraction");
    }
    if (params.contains("link_count_mode")) {
      bundle.params.link_count_mode =
          parse_link_count_mode(params["link_count_mode"]);
    }
    if (params.contains("batch_size")) {
      bundle.params.batch_size =
          require_number(params["batch_size"], "params.batch_size");
    }
  }

  if (doc.contains("placement")) {
    bundle.placement = parse_placement(doc["placement"], "placement");
  }
  if (doc.contains("scenario")) {
    bundle.scenario = parse_scenario(doc["scenario"]);
  }
  return bundle;
}

ValidationReport validate_bundle(const ProblemBundle& bundle) {
  ValidationReport report;
  report.merge(validate_graph(bundle.graph));
  report.merge(
      validate_topology(bundle.topology, bundle.graph.operator_count()));

  if (bundle.params.alpha < 0.0) {
    report.add_error("param-range", "params.alpha is negative");
  }
  if (bundle.params.beta < 0.0) {
    report.add_error("param-range", "params.beta is negative");
  }
  if (bundle.params.dq_fraction < 0.0 || bundle.params.dq_fraction > 1.0) {
    report.add_error("param-range",
                     "params.dq_fraction outside [0, 1]");
  }
  if (!(bundle.params.batch_size > 0.0)) {
    report.add_error("param-range", "params.batch_size must be positive");
  }

  if (bundle.placement.has_value()) {
    report.merge(
        validate_placement(*bundle.placement, bundle.graph, bundle.topology));
  }
  if (bundle.scenario.has_value()) {
    report.merge(
        validate_scenario(*bundle.scenario, bundle.graph, bundle.topology));
  }
  return report;
}

ProblemBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw BundleError("cannot open " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw BundleError(path + ": " + err.what());
  }
  ProblemBundle bundle = parse_bundle(doc);
  const ValidationReport report = validate_bundle(bundle);
  if (!report.ok()) {
    throw BundleError(path + " is invalid:\n" + report.to_string());
  }
  return bundle;
}

json bundle_to_json(const ProblemBundle& bundle) {
  json doc = json::object();

  doc["operators"] = json::array();
  for (const Operator& op : bundle.graph.operators) {
    doc["operators"].push_back({{"id", op.id},
                                {"selectivity", op.selectivity}});
  }
  doc["edges"] = json::array();
  for (const Edge& e : bundle.graph.edges) {
    doc["edges"].push_back({e.from, e.to});
  }
  doc["com_cost"] = bundle.topology.com_cost;
  doc["availability"] = bundle.topology.availability;
  doc["params"] = {
      {"alpha", bundle.params.alpha},
      {"beta", bundle.params.beta},
      {"dq_fraction", bundle.params.dq_fraction},
      {"link_count_mode",
       bundle.params.link_count_mode == LinkCountMode::Pairs ? "pairs"
                                                             : "devices"},
      {"batch_size", bundle.params.batch_size},
  };
  if (bundle.placement.has_value()) {
    doc["placement"] = bundle.placement->fractions;
  }
  if (bundle.scenario.has_value()) {
    json levels = json::array();
    for (const DqLevel& level : bundle.scenario->levels) {
      json entry = {{"dq_fraction", level.dq_fraction}};
      if (!level.caps.empty()) {
        json caps = json::array();
        for (const FractionCap& cap : level.caps) {
          caps.push_back({{"op", cap.op},
                          {"device", cap.device},
                          {"max_fraction", cap.max_fraction}});
        }
        entry["caps"] = std::move(caps);
      }
      if (level.placement.has_value()) {
        entry["placement"] = level.placement->fractions;
      }
      levels.push_back(std::move(entry));
    }
    doc["scenario"] = std::move(levels);
  }
  return doc;
}

namespace {

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw BundleError("cannot write " + path);
  }
  out << doc.dump(2) << '\n';
}

}  // namespace

void save_bundle(const ProblemBundle& bundle, const std::string& path) {
  write_json(bundle_to_json(bundle), path);
}

json placement_to_json(const Placement& placement) {
  return json{{"placement", placement.fractions}};
}

void save_placement(const Placement& placement, const std::string& path) {
  write_json(placement_to_json(placement), path);
}

namespace {

// Placement used by a fixed sweep at one scenario level, validated against
// the level's caps.
const Placement& fixed_level_placement(const ProblemBundle& bundle,
                                       const DqLevel& level, int level_index) {
  if (level.placement.has_value()) return *level.placement;
  if (!bundle.placement.has_value()) {
    throw std::invalid_argument(
        "fixed sweep requires a placement in the bundle or on level " +
        std::to_string(level_index));
  }
  const auto bounds =
      level_bounds(level, bundle.graph.operator_count(), bundle.topology);
  const auto& fractions = bundle.placement->fractions;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    for (std::size_t u = 0; u < fractions[i].size(); ++u) {
      if (fractions[i][u] > bounds[i][u] + 1e-9) {
        throw std::invalid_argument(
            "bundle placement violates level " + std::to_string(level_index) +
            " caps: operator " + std::to_string(i) + " puts " +
            std::to_string(fractions[i][u]) + " on device " +
            std::to_string(u) + ", above " + std::to_string(bounds[i][u]));
      }
    }
  }
  return *bundle.placement;
}

std::string method_name(std::optional<OptimizeMethod> method) {
  if (!method.has_value()) return "fixed";
  return *method == OptimizeMethod::BruteForce ? "brute_force"
                                               : "local_search";
}

}  // namespace

std::vector<SweepRow> run_sweep(const ProblemBundle& bundle,
                                std::vector<double> betas,
                                std::vector<double> dq_values,
                                std::optional<OptimizeMethod> method,
                                const OptimizerConfig& config) {
  if (betas.empty()) {
    throw std::invalid_argument("sweep requires at least one beta");
  }
  std::sort(betas.begin(), betas.end());
  std::sort(dq_values.begin(), dq_values.end());

  const std::string name = method_name(method);
  std::vector<SweepRow> rows;

  if (!dq_values.empty()) {
    if (!method.has_value() && !bundle.placement.has_value()) {
      throw std::invalid_argument("fixed sweep requires a placement");
    }
    for (double beta : betas) {
      for (double dq : dq_values) {
        ModelParams params = bundle.params;
        params.beta = beta;
        params.dq_fraction = dq;
        SweepRow row{beta, dq, 0.0, 0.0, name};
        if (method.has_value()) {
          const OptimizationResult result =
              *method == OptimizeMethod::BruteForce
                  ? brute_force_optimize(bundle.graph, bundle.topology,
                                         params, nullptr, config)
                  : local_search_optimize(bundle.graph, bundle.topology,
                                          params, nullptr, config);
          row.latency = result.latency;
          row.objective = result.objective;
        } else {
          row.latency = total_latency(bundle.graph, bundle.topology,
                                      *bundle.placement, params);
          row.objective = objective_f(row.latency, params);
        }
        rows.push_back(row);
      }
    }
    return rows;
  }

  if (!bundle.scenario.has_value()) {
    throw std::invalid_argument(
        "sweep requires explicit dq values or a scenario in the bundle");
  }
  std::vector<int> order(bundle.scenario->levels.size());
  for (std::size_t l = 0; l < order.size(); ++l) order[l] = static_cast<int>(l);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return bundle.scenario->levels[a].dq_fraction <
           bundle.scenario->levels[b].dq_fraction;
  });

  for (double beta : betas) {
    for (int l : order) {
      const DqLevel& level = bundle.scenario->levels[l];
      ModelParams params = bundle.params;
      params.beta = beta;
      params.dq_fraction = level.dq_fraction;
      SweepRow row{beta, level.dq_fraction, 0.0, 0.0, name};
      if (method.has_value()) {
        DqScenario single;
        single.levels.push_back(level);
        const OptimizationResult result =
            optimize_with_dq(bundle.graph, bundle.topology, params, single,
                             config, *method);
        row.latency = result.latency;
        row.objective = result.objective;
      } else {
        const Placement& placement = fixed_level_placement(bundle, level, l);
        row.latency =
            total_latency(bundle.graph, bundle.topology, placement, params);
        row.objective = objective_f(row.latency, params);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "beta,dq_fraction,latency,objective,method\n";
  for (const SweepRow& row : rows) {
    out += format_double(row.beta, 17);
    out += ',';
    out += format_double(row.dq_fraction, 17);
    out += ',';
    out += format_double(row.latency, 17);
    out += ',';
    out += format_double(row.objective, 17);
    out += ',';
    out += row.method;
    out += '\n';
  }
  return out;
}

std::string format_double(double value, int significant_digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", significant_digits, value);
  return buffer;
}

}  // namespace streamplace
