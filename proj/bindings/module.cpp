#include <optional>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "streamplace/bundle.hpp"
#include "streamplace/graph.hpp"
#include "streamplace/model.hpp"
#include "streamplace/optimize.hpp"
#include "streamplace/types.hpp"
#include "streamplace/validation.hpp"

namespace py = pybind11;
using namespace streamplace;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quality-aware cost model and placement optimizer for streaming "
            "dataflows";

  py::register_exception<InfeasibleError>(m, "InfeasibleError",
                                          PyExc_RuntimeError);
  py::register_exception<BundleError>(m, "BundleError", PyExc_RuntimeError);
  py::register_exception<PathExplosionError>(m, "PathExplosionError",
                                             PyExc_RuntimeError);
  py::register_exception<SearchSpaceError>(m, "SearchSpaceError",
                                           PyExc_RuntimeError);

  py::class_<Operator>(m, "Operator")
      .def(py::init<>())
      .def(py::init([](int id, double selectivity) {
             return Operator{id, selectivity};
           }),
           py::arg("id"), py::arg("selectivity"))
      .def_readwrite("id", &Operator::id)
      .def_readwrite("selectivity", &Operator::selectivity);

  py::class_<Edge>(m, "Edge")
      .def(py::init<>())
      .def(py::init([](int from, int to) { return Edge{from, to}; }),
           py::arg("from_op"), py::arg("to_op"))
      .def_readwrite("from_op", &Edge::from)
      .def_readwrite("to_op", &Edge::to)
      .def("__eq__",
           [](const Edge& a, const Edge& b) { return a == b; })
      .def("__repr__", [](const Edge& e) {
        return "Edge(" + std::to_string(e.from) + ", " + std::to_string(e.to) +
               ")";
      });

  py::class_<OperatorGraph>(m, "OperatorGraph")
      .def(py::init<>())
      .def(py::init([](std::vector<Operator> operators,
                       std::vector<Edge> edges) {
             return OperatorGraph{std::move(operators), std::move(edges)};
           }),
           py::arg("operators"), py::arg("edges"))
      .def_readwrite("operators", &OperatorGraph::operators)
      .def_readwrite("edges", &OperatorGraph::edges)
      .def("operator_count", &OperatorGraph::operator_count)
      .def("has_edge", &OperatorGraph::has_edge, py::arg("from_op"),
           py::arg("to_op"))
      .def("out_neighbors", &OperatorGraph::out_neighbors, py::arg("op"))
      .def("sources", &OperatorGraph::sources)
      .def("sinks", &OperatorGraph::sinks);

  py::class_<DeviceTopology>(m, "DeviceTopology")
      .def(py::init<>())
      .def(py::init([](int device_count,
                       std::vector<std::vector<double>> com_cost,
                       std::vector<std::vector<bool>> availability) {
             return DeviceTopology{device_count, std::move(com_cost),
                                   std::move(availability)};
           }),
           py::arg("device_count"), py::arg("com_cost"),
           py::arg("availability"))
      .def_readwrite("device_count", &DeviceTopology::device_count)
      .def_readwrite("com_cost", &DeviceTopology::com_cost)
      .def_readwrite("availability", &DeviceTopology::availability);

  py::class_<Placement>(m, "Placement")
      .def(py::init<>())
      .def(py::init([](std::vector<std::vector<double>> fractions) {
             return Placement{std::move(fractions)};
           }),
           py::arg("fractions"))
      .def_readwrite("fractions", &Placement::fractions)
      .def("operator_count", &Placement::operator_count)
      .def("device_count", &Placement::device_count);

  py::enum_<LinkCountMode>(m, "LinkCountMode")
      .value("PAIRS", LinkCountMode::Pairs)
      .value("DEVICES", LinkCountMode::Devices);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("dq_fraction", &ModelParams::dq_fraction)
      .def_readwrite("link_count_mode", &ModelParams::link_count_mode)
      .def_readwrite("batch_size", &ModelParams::batch_size);

  py::class_<EdgeLatencyBreakdown>(m, "EdgeLatencyBreakdown")
      .def_readonly("edge", &EdgeLatencyBreakdown::edge)
      .def_readonly("per_device_cost", &EdgeLatencyBreakdown::per_device_cost)
      .def_readonly("enabled_links", &EdgeLatencyBreakdown::enabled_links)
      .def_readonly("latency", &EdgeLatencyBreakdown::latency);

  py::enum_<IssueSeverity>(m, "IssueSeverity")
      .value("WARNING", IssueSeverity::Warning)
      .value("ERROR", IssueSeverity::Error);

  py::class_<ValidationIssue>(m, "ValidationIssue")
      .def_readonly("severity", &ValidationIssue::severity)
      .def_readonly("code", &ValidationIssue::code)
      .def_readonly("message", &ValidationIssue::message);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("issues", &ValidationReport::issues)
      .def("ok", &ValidationReport::ok)
      .def("empty", &ValidationReport::empty)
      .def("error_count", &ValidationReport::error_count)
      .def("has", &ValidationReport::has, py::arg("code"))
      .def("__str__", &ValidationReport::to_string);

  py::class_<DagPath>(m, "DagPath")
      .def(py::init<>())
      .def_readwrite("edges", &DagPath::edges);

  py::class_<CriticalPathResult>(m, "CriticalPathResult")
      .def_readonly("latency", &CriticalPathResult::latency)
      .def_readonly("path", &CriticalPathResult::path);

  py::class_<FractionCap>(m, "FractionCap")
      .def(py::init<>())
      .def(py::init([](int op, int device, double max_fraction) {
             return FractionCap{op, device, max_fraction};
           }),
           py::arg("op"), py::arg("device"), py::arg("max_fraction"))
      .def_readwrite("op", &FractionCap::op)
      .def_readwrite("device", &FractionCap::device)
      .def_readwrite("max_fraction", &FractionCap::max_fraction);

  py::class_<DqLevel>(m, "DqLevel")
      .def(py::init<>())
      .def_readwrite("dq_fraction", &DqLevel::dq_fraction)
      .def_readwrite("caps", &DqLevel::caps)
      .def_readwrite("placement", &DqLevel::placement);

  py::class_<DqScenario>(m, "DqScenario")
      .def(py::init<>())
      .def_readwrite("levels", &DqScenario::levels);

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("granularity", &OptimizerConfig::granularity)
      .def_readwrite("max_iterations", &OptimizerConfig::max_iterations)
      .def_readwrite("restarts", &OptimizerConfig::restarts)
      .def_readwrite("move_step", &OptimizerConfig::move_step)
      .def_readwrite("initial_temperature",
                     &OptimizerConfig::initial_temperature)
      .def_readwrite("cooling", &OptimizerConfig::cooling)
      .def_readwrite("seed", &OptimizerConfig::seed)
      .def_readwrite("grid_moves", &OptimizerConfig::grid_moves)
      .def_readwrite("max_candidates", &OptimizerConfig::max_candidates);

  py::enum_<OptimizeMethod>(m, "OptimizeMethod")
      .value("BRUTE_FORCE", OptimizeMethod::BruteForce)
      .value("LOCAL_SEARCH", OptimizeMethod::LocalSearch);

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("placement", &OptimizationResult::placement)
      .def_readonly("dq_fraction", &OptimizationResult::dq_fraction)
      .def_readonly("latency", &OptimizationResult::latency)
      .def_readonly("objective", &OptimizationResult::objective)
      .def_readonly("evaluations", &OptimizationResult::evaluations)
      .def_readonly("method", &OptimizationResult::method)
      .def_readonly("level_index", &OptimizationResult::level_index);

  py::class_<CandidateEvaluation>(m, "CandidateEvaluation")
      .def_readonly("latency", &CandidateEvaluation::latency)
      .def_readonly("objective", &CandidateEvaluation::objective)
      .def_readonly("network_volume", &CandidateEvaluation::network_volume);

  py::class_<ProblemBundle>(m, "ProblemBundle")
      .def(py::init<>())
      .def_readwrite("graph", &ProblemBundle::graph)
      .def_readwrite("topology", &ProblemBundle::topology)
      .def_readwrite("params", &ProblemBundle::params)
      .def_readwrite("placement", &ProblemBundle::placement)
      .def_readwrite("scenario", &ProblemBundle::scenario);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("beta", &SweepRow::beta)
      .def_readonly("dq_fraction", &SweepRow::dq_fraction)
      .def_readonly("latency", &SweepRow::latency)
      .def_readonly("objective", &SweepRow::objective)
      .def_readonly("method", &SweepRow::method);

  m.def("enabled_links", &enabled_links, py::arg("graph"),
        py::arg("placement"), py::arg("from_op"), py::arg("to_op"),
        py::arg("mode") = LinkCountMode::Pairs);
  m.def("edge_latency", &edge_latency, py::arg("graph"), py::arg("topology"),
        py::arg("placement"), py::arg("params"), py::arg("from_op"),
        py::arg("to_op"));
  m.def("objective_f", &objective_f, py::arg("latency"), py::arg("params"));
  m.def("network_volume", &network_volume, py::arg("graph"),
        py::arg("topology"), py::arg("placement"));
  m.def("validate_placement", &validate_placement, py::arg("placement"),
        py::arg("graph"), py::arg("topology"));
  m.def("validate_topology", &validate_topology, py::arg("topology"),
        py::arg("operator_count"));
  m.def("validate_graph", &validate_graph, py::arg("graph"));
  m.def("validate_scenario", &validate_scenario, py::arg("scenario"),
        py::arg("graph"), py::arg("topology"));

  m.def("count_paths", &count_paths, py::arg("graph"),
        py::arg("cap") = kDefaultPathCap);
  m.def("enumerate_paths", &enumerate_paths, py::arg("graph"),
        py::arg("cap") = kDefaultPathCap);
  m.def("path_latency", &path_latency, py::arg("path"), py::arg("graph"),
        py::arg("topology"), py::arg("placement"), py::arg("params"));
  m.def("critical_path", &critical_path, py::arg("graph"),
        py::arg("topology"), py::arg("placement"), py::arg("params"));
  m.def("total_latency", &total_latency, py::arg("graph"), py::arg("topology"),
        py::arg("placement"), py::arg("params"));

  m.def("level_bounds", &level_bounds, py::arg("level"),
        py::arg("operator_count"), py::arg("topology"));
  m.def("evaluate_candidate", &evaluate_candidate, py::arg("graph"),
        py::arg("topology"), py::arg("placement"), py::arg("params"));
  m.def(
      "brute_force_optimize",
      [](const OperatorGraph& graph, const DeviceTopology& topo,
         const ModelParams& params, const std::optional<DqScenario>& scenario,
         const OptimizerConfig& config) {
        return brute_force_optimize(graph, topo, params,
                                    scenario ? &*scenario : nullptr, config);
      },
      py::arg("graph"), py::arg("topology"), py::arg("params"),
      py::arg("scenario") = py::none(),
      py::arg("config") = OptimizerConfig{});
  m.def(
      "local_search_optimize",
      [](const OperatorGraph& graph, const DeviceTopology& topo,
         const ModelParams& params, const std::optional<DqScenario>& scenario,
         const OptimizerConfig& config) {
        return local_search_optimize(graph, topo, params,
                                     scenario ? &*scenario : nullptr, config);
      },
      py::arg("graph"), py::arg("topology"), py::arg("params"),
      py::arg("scenario") = py::none(),
      py::arg("config") = OptimizerConfig{});
  m.def("optimize_with_dq", &optimize_with_dq, py::arg("graph"),
        py::arg("topology"), py::arg("params"), py::arg("scenario"),
        py::arg("config") = OptimizerConfig{},
        py::arg("method") = OptimizeMethod::BruteForce);

  m.def("load_bundle", &load_bundle, py::arg("path"));
  m.def("save_bundle", &save_bundle, py::arg("bundle"), py::arg("path"));
  m.def(
      "bundle_from_json",
      [](const std::string& text) {
        return parse_bundle(nlohmann::json::parse(text));
      },
      py::arg("text"));
  m.def(
      "bundle_to_json",
      [](const ProblemBundle& bundle) { return bundle_to_json(bundle).dump(2); },
      py::arg("bundle"));
  m.def("validate_bundle", &validate_bundle, py::arg("bundle"));
  m.def("save_placement", &save_placement, py::arg("placement"),
        py::arg("path"));
  m.def("run_sweep", &run_sweep, py::arg("bundle"), py::arg("betas"),
        py::arg("dq_values"), py::arg("method") = py::none(),
        py::arg("config") = OptimizerConfig{});
  m.def("sweep_csv", &sweep_csv, py::arg("rows"));
  m.def("format_double", &format_double, py::arg("value"),
        py::arg("significant_digits"));
}
