#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cascade/graph.hpp"
#include "cascade/risk.hpp"
#include "cascade/scenario.hpp"
#include "cascade/simulator.hpp"
#include "cascade/stats.hpp"

namespace py = pybind11;
using namespace cascade;

// Python surface uses the library's 0-based agent indices; only files and
// CLI tables are 1-based.
PYBIND11_MODULE(_core, m) {
    m.doc() = "Cascading-fluctuation value-at-risk for time-delay consensus networks";

    py::register_exception<Error>(m, "CascadeError");

    py::class_<Edge>(m, "Edge")
        .def(py::init<int, int, double>(), py::arg("i"), py::arg("j"),
             py::arg("w") = 1.0)
        .def_readonly("i", &Edge::i)
        .def_readonly("j", &Edge::j)
        .def_readonly("w", &Edge::w);

    py::class_<WeightedGraph>(m, "WeightedGraph")
        .def(py::init([](int n, const std::vector<std::tuple<int, int, double>>& edges) {
                 std::vector<Edge> es;
                 es.reserve(edges.size());
                 for (const auto& [i, j, w] : edges) es.push_back({i, j, w});
                 return WeightedGraph(n, std::move(es));
             }),
             py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &WeightedGraph::size)
        .def("laplacian", &WeightedGraph::laplacian)
        .def("edges", [](const WeightedGraph& g) {
            std::vector<std::tuple<int, int, double>> out;
            for (const auto& e : g.edges()) out.emplace_back(e.i, e.j, e.w);
            return out;
        });

    m.def("build_path", &build_path, py::arg("n"));
    m.def("build_pcycle", &build_pcycle, py::arg("n"), py::arg("p"));
    m.def("build_complete", &build_complete, py::arg("n"));
    m.def("load_edge_list", &load_edge_list, py::arg("path"));

    py::class_<SpectralData>(m, "SpectralData")
        .def_readonly("lambdas", &SpectralData::lambdas)
        .def_readonly("Q", &SpectralData::Q)
        .def_property_readonly("lambda_max", &SpectralData::lambda_max);
    m.def("spectral", &spectral, py::arg("laplacian"));
    m.def("max_stable_delay", &max_stable_delay, py::arg("spectral"));

    py::class_<NoiseDelayConfig>(m, "NoiseDelayConfig")
        .def(py::init([](double b, double tau) {
                 return NoiseDelayConfig{b, tau};
             }),
             py::arg("b"), py::arg("tau"))
        .def_readwrite("b", &NoiseDelayConfig::b)
        .def_readwrite("tau", &NoiseDelayConfig::tau);

    py::class_<SteadyStateCovariance>(m, "SteadyStateCovariance")
        .def_readonly("sigma", &SteadyStateCovariance::sigma)
        .def("stddev", &SteadyStateCovariance::stddev, py::arg("j"));
    m.def("steady_state_covariance", &steady_state_covariance,
          py::arg("spectral"), py::arg("noise"));
    m.def("correlation", &correlation, py::arg("cov"), py::arg("i"), py::arg("j"));

    py::class_<FailureScenario>(m, "FailureScenario")
        .def(py::init([](std::vector<int> indices, std::vector<double> values) {
                 return FailureScenario{std::move(indices), std::move(values)};
             }),
             py::arg("indices") = std::vector<int>{},
             py::arg("values") = std::vector<double>{})
        .def_readonly("indices", &FailureScenario::indices)
        .def_readonly("values", &FailureScenario::values)
        .def("extended", &FailureScenario::extended, py::arg("k"), py::arg("y_fk"));

    py::class_<ConditionalStats>(m, "ConditionalStats")
        .def_readonly("mu_tilde", &ConditionalStats::mu_tilde)
        .def_readonly("sigma_tilde_sq", &ConditionalStats::sigma_tilde_sq);
    m.def("conditional_stats", &conditional_stats, py::arg("cov"), py::arg("j"),
          py::arg("scenario"));
    m.def("incremental_update", &incremental_update, py::arg("cov"),
          py::arg("j"), py::arg("scenario"), py::arg("k"), py::arg("y_fk"));

    py::class_<RiskParams>(m, "RiskParams")
        .def(py::init([](double c, double epsilon, double delta_max) {
                 return RiskParams{c, epsilon, delta_max};
             }),
             py::arg("c") = 0.1, py::arg("epsilon") = 0.1,
             py::arg("delta_max") = 1e9)
        .def_readwrite("c", &RiskParams::c)
        .def_readwrite("epsilon", &RiskParams::epsilon)
        .def_readwrite("delta_max", &RiskParams::delta_max);

    py::enum_<RiskClass>(m, "RiskClass")
        .value("zero", RiskClass::zero)
        .value("positive", RiskClass::positive)
        .value("infinite", RiskClass::infinite);

    py::class_<RiskValue>(m, "RiskValue")
        .def_readonly("value", &RiskValue::value)
        .def_readonly("classification", &RiskValue::classification)
        .def_readonly("trigger", &RiskValue::trigger)
        .def("is_infinite", &RiskValue::is_infinite)
        .def("__repr__", [](const RiskValue& r) {
            return r.is_infinite() ? std::string("RiskValue(inf)")
                                   : "RiskValue(" + std::to_string(r.value) + ")";
        });

    m.def("erf_inv", &erf_inv, py::arg("x"));
    m.def("exceedance_probability", &exceedance_probability, py::arg("cs"),
          py::arg("c"), py::arg("delta"));
    m.def("cascading_risk", &cascading_risk, py::arg("cs"), py::arg("params"));
    m.def("single_agent_risk", &single_agent_risk, py::arg("sigma_j"),
          py::arg("params"));
    m.def(
        "risk_profile",
        [](const SteadyStateCovariance& cov, const FailureScenario& scenario,
           const RiskParams& p) { return risk_profile(cov, scenario, p).values; },
        py::arg("cov"), py::arg("scenario"), py::arg("params"));

    py::class_<VulnerableSequence>(m, "VulnerableSequence")
        .def_readonly("order", &VulnerableSequence::order)
        .def_readonly("risks", &VulnerableSequence::risks);
    m.def("most_vulnerable_sequence", &most_vulnerable_sequence, py::arg("cov"),
          py::arg("params"), py::arg("y_f_value"), py::arg("length"),
          py::arg("seed_scenario") = FailureScenario{});

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("horizon", &SimConfig::horizon)
        .def_readwrite("burn_in", &SimConfig::burn_in)
        .def_readwrite("trials", &SimConfig::trials)
        .def_readwrite("seed", &SimConfig::seed);

    py::class_<EmpiricalStats>(m, "EmpiricalStats")
        .def_readonly("cov_hat", &EmpiricalStats::cov_hat)
        .def_readonly("mean_hat", &EmpiricalStats::mean_hat)
        .def_readonly("cov_se", &EmpiricalStats::cov_se)
        .def_readonly("samples", &EmpiricalStats::samples);
    m.def("simulate", &simulate, py::arg("graph"), py::arg("noise"),
          py::arg("sim"), py::call_guard<py::gil_scoped_release>());

    m.def("sample_steady_state", &sample_steady_state, py::arg("cov"),
          py::arg("count"), py::arg("seed"));

    py::class_<OracleEstimate>(m, "OracleEstimate")
        .def_readonly("probability", &OracleEstimate::probability)
        .def_readonly("std_error", &OracleEstimate::std_error)
        .def_readonly("accepted", &OracleEstimate::accepted);
    m.def("conditional_risk_oracle", &conditional_risk_oracle, py::arg("cov"),
          py::arg("j"), py::arg("scenario"), py::arg("params"), py::arg("delta"),
          py::arg("band"), py::arg("count"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());

    m.attr("__version__") = kToolVersion;
}
