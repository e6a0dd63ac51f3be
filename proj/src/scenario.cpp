#include "cascade/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace cascade {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

struct ErrorList {
    std::vector<std::string> items;

    void add(const std::string& msg) { items.push_back(msg); }
    void raise_if_any(const std::string& origin) const {
        if (items.empty()) return;
        std::string joined = origin + ": invalid configuration";
        for (const auto& it : items) joined += "\n  - " + it;
        throw ConfigError(joined);
    }
};

std::vector<int> to_internal_indices(const json& arr, ErrorList& errors,
                                     const std::string& what) {
    std::vector<int> out;
    for (const auto& v : arr) {
        if (!v.is_number_integer()) {
            errors.add(what + ": indices must be integers");
            return {};
        }
        out.push_back(v.get<int>() - 1);
    }
    return out;
}

void sort_failures(FailureScenario& f) {
    std::vector<int> perm(f.indices.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return f.indices[a] < f.indices[b]; });
    FailureScenario sorted;
    for (int p : perm) {
        sorted.indices.push_back(f.indices[p]);
        sorted.values.push_back(f.values[p]);
    }
    f = std::move(sorted);
}

void parse_failure_set(const json& node, ErrorList& errors,
                       const std::string& what, std::vector<int>& indices,
                       std::vector<double>& values) {
    if (!node.contains("indices") || !node["indices"].is_array()) {
        errors.add(what + ": missing 'indices' array");
        return;
    }
    indices = to_internal_indices(node["indices"], errors, what);
    if (node.contains("values")) {
        values = node["values"].get<std::vector<double>>();
        if (values.size() != indices.size()) {
            errors.add(what + ": 'values' length must match 'indices'");
        }
    } else if (node.contains("value")) {
        values.assign(indices.size(), node["value"].get<double>());
    } else if (!indices.empty()) {
        errors.add(what + ": need 'values' or a uniform 'value'");
    }
}

}  // namespace

WeightedGraph ScenarioConfig::build() const {
    switch (graph_kind) {
        case GraphKind::path: return build_path(n);
        case GraphKind::pcycle: return build_pcycle(n, p);
        case GraphKind::complete: return build_complete(n);
        case GraphKind::custom: return load_edge_list(edge_list_path);
    }
    throw ParameterError("unreachable graph kind");
}

ScenarioConfig parse_config(const std::string& text,
                            const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    ErrorList errors;
    ScenarioConfig cfg;

    if (!doc.contains("graph")) {
        errors.add("graph: section is required");
    } else {
        const auto& g = doc["graph"];
        try {
            cfg.graph_kind = parse_graph_kind(g.value("kind", ""));
        } catch (const ParameterError& e) {
            errors.add(std::string("graph.kind: ") + e.what());
        }
        if (cfg.graph_kind == GraphKind::custom) {
            cfg.edge_list_path = g.value("edge_list", "");
            if (cfg.edge_list_path.empty()) {
                errors.add("graph.edge_list: required for custom graphs");
            }
        } else {
            cfg.n = g.value("n", 0);
            if (cfg.n < 2) errors.add("graph.n: need at least 2 agents");
        }
        if (cfg.graph_kind == GraphKind::pcycle) {
            cfg.p = g.value("p", 0);
            if (cfg.n >= 2 && (cfg.p < 1 || cfg.p > (cfg.n - 1) / 2)) {
                errors.add("graph.p: must lie in [1, floor((n-1)/2)]");
            }
        }
    }

    if (doc.contains("noise")) {
        cfg.noise.b = doc["noise"].value("b", 1.0);
        cfg.noise.tau = doc["noise"].value("tau", 0.0);
        if (cfg.noise.tau < 0.0) errors.add("noise.tau: must be non-negative");
    }

    if (doc.contains("risk")) {
        const auto& r = doc["risk"];
        cfg.risk.c = r.value("c", 0.1);
        cfg.risk.epsilon = r.value("epsilon", 0.1);
        if (r.contains("delta_max")) {
            cfg.risk.delta_max = r["delta_max"].get<double>();
            cfg.delta_max_given = true;
            if (!(cfg.risk.delta_max > 0.0) || !std::isfinite(cfg.risk.delta_max)) {
                errors.add("risk.delta_max: must be positive and finite");
            }
        }
        if (!(cfg.risk.c > 0.0)) errors.add("risk.c: must be positive");
        if (!(cfg.risk.epsilon > 0.0 && cfg.risk.epsilon < 1.0)) {
            errors.add("risk.epsilon: must lie in (0, 1)");
        }
    }

    if (doc.contains("failures")) {
        parse_failure_set(doc["failures"], errors, "failures",
                          cfg.failures.indices, cfg.failures.values);
        sort_failures(cfg.failures);
    }

    if (doc.contains("sequence")) {
        const auto& s = doc["sequence"];
        cfg.sequence_length = s.value("length", 0);
        cfg.y_f_value = s.value("y_f_value", 0.0);
        if (cfg.sequence_length < 1) errors.add("sequence.length: must be >= 1");
        if (!(std::abs(cfg.y_f_value) > cfg.risk.c)) {
            errors.add("sequence.y_f_value: |y_f_value| must exceed risk.c");
        }
    }

    if (doc.contains("sweep")) {
        const auto& sw = doc["sweep"];
        if (!sw.contains("points") || !sw["points"].is_array()) {
            errors.add("sweep.points: array is required");
        } else {
            int pt = 0;
            for (const auto& pnode : sw["points"]) {
                SweepPoint point;
                parse_failure_set(pnode, errors,
                                  "sweep.points[" + std::to_string(pt) + "]",
                                  point.indices, point.values);
                point.label = pnode.value("label", "point_" + std::to_string(pt));
                cfg.sweep.push_back(std::move(point));
                ++pt;
            }
        }
    }

    if (doc.contains("simulator")) {
        const auto& s = doc["simulator"];
        cfg.sim.dt = s.value("dt", cfg.sim.dt);
        cfg.sim.horizon = s.value("horizon", cfg.sim.horizon);
        cfg.sim.burn_in = s.value("burn_in", cfg.sim.burn_in);
        cfg.sim.trials = s.value("trials", cfg.sim.trials);
        cfg.sim.seed = s.value("seed", cfg.sim.seed);
        cfg.oracle_band = s.value("band", cfg.oracle_band);
        cfg.oracle_count = s.value("count", cfg.oracle_count);
        if (!(cfg.sim.dt > 0.0)) errors.add("simulator.dt: must be positive");
        if (!(cfg.sim.burn_in >= 0.0 && cfg.sim.burn_in < cfg.sim.horizon)) {
            errors.add("simulator.burn_in: must lie in [0, horizon)");
        }
        if (cfg.sim.trials < 1) errors.add("simulator.trials: must be >= 1");
        if (cfg.noise.tau > 0.0 && cfg.sim.dt > cfg.noise.tau / 20.0) {
            errors.add("simulator.dt: must not exceed tau/20");
        }
    }

    // Cross-cutting checks need the graph; build it only if the sections
    // above parsed cleanly.
    if (errors.items.empty()) {
        try {
            const WeightedGraph graph = cfg.build();
            const int n = graph.size();
            const SpectralData s = spectral(graph.laplacian());
            const double bound = max_stable_delay(s);
            if (cfg.noise.tau >= bound) {
                errors.add("noise.tau: " + format_double(cfg.noise.tau) +
                           " is at or above the stability bound " +
                           format_double(bound));
            }
            if (cfg.sim.dt * s.lambda_max() >= 0.1) {
                errors.add("simulator.dt: dt * lambda_n must stay below 0.1");
            }
            auto check_set = [&](const FailureScenario& f, const std::string& what) {
                try {
                    validate_scenario(f, n);
                } catch (const Error& e) {
                    errors.add(what + ": " + e.what());
                }
                for (double v : f.values) {
                    if (!(std::abs(v) > cfg.risk.c)) {
                        errors.add(what + ": |y_f| must exceed risk.c");
                        break;
                    }
                }
            };
            check_set(cfg.failures, "failures");
            for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
                FailureScenario f{cfg.sweep[i].indices, cfg.sweep[i].values};
                sort_failures(f);
                cfg.sweep[i].indices = f.indices;
                cfg.sweep[i].values = f.values;
                check_set(f, "sweep.points[" + std::to_string(i) + "]");
            }
            if (cfg.sequence_length >
                n - static_cast<int>(cfg.failures.indices.size())) {
                errors.add("sequence.length: exceeds the number of non-failed agents");
            }
        } catch (const Error& e) {
            errors.add(std::string("graph: ") + e.what());
        }
    }

    errors.raise_if_any(origin);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string serialize_config(const ScenarioConfig& cfg) {
    json doc;
    auto& g = doc["graph"];
    switch (cfg.graph_kind) {
        case GraphKind::path: g["kind"] = "path"; break;
        case GraphKind::pcycle: g["kind"] = "pcycle"; break;
        case GraphKind::complete: g["kind"] = "complete"; break;
        case GraphKind::custom: g["kind"] = "custom"; break;
    }
    if (cfg.graph_kind == GraphKind::custom) {
        g["edge_list"] = cfg.edge_list_path;
    } else {
        g["n"] = cfg.n;
    }
    if (cfg.graph_kind == GraphKind::pcycle) g["p"] = cfg.p;
    doc["noise"] = {{"b", cfg.noise.b}, {"tau", cfg.noise.tau}};
    doc["risk"] = {{"c", cfg.risk.c}, {"epsilon", cfg.risk.epsilon}};
    if (cfg.delta_max_given) doc["risk"]["delta_max"] = cfg.risk.delta_max;
    if (!cfg.failures.indices.empty()) {
        json idx = json::array();
        for (int i : cfg.failures.indices) idx.push_back(i + 1);
        doc["failures"] = {{"indices", idx}, {"values", cfg.failures.values}};
    }
    if (cfg.sequence_length > 0) {
        doc["sequence"] = {{"length", cfg.sequence_length},
                           {"y_f_value", cfg.y_f_value}};
    }
    if (!cfg.sweep.empty()) {
        json pts = json::array();
        for (const auto& pt : cfg.sweep) {
            json idx = json::array();
            for (int i : pt.indices) idx.push_back(i + 1);
            pts.push_back({{"indices", idx},
                           {"values", pt.values},
                           {"label", pt.label}});
        }
        doc["sweep"] = {{"points", pts}};
    }
    doc["simulator"] = {{"dt", cfg.sim.dt},
                        {"horizon", cfg.sim.horizon},
                        {"burn_in", cfg.sim.burn_in},
                        {"trials", cfg.sim.trials},
                        {"seed", cfg.sim.seed},
                        {"band", cfg.oracle_band},
                        {"count", cfg.oracle_count}};
    return doc.dump(2);
}

namespace {

RiskParams effective_risk_params(const ScenarioConfig& cfg,
                                 const SteadyStateCovariance& cov) {
    RiskParams p = cfg.risk;
    if (!cfg.delta_max_given) {
        double max_std = 0.0;
        for (int j = 0; j < cov.size(); ++j) max_std = std::max(max_std, cov.stddev(j));
        p.delta_max = std::max(1e6 * max_std, 1.0);
    }
    return p;
}

std::vector<AgentResult> profile_agents(const SteadyStateCovariance& cov,
                                        const FailureScenario& scenario,
                                        const RiskParams& p) {
    const RiskProfile profile = risk_profile(cov, scenario, p);
    std::vector<AgentResult> agents(cov.size());
    for (int j = 0; j < cov.size(); ++j) {
        AgentResult& a = agents[j];
        a.agent = j + 1;
        a.risk = profile.values[j];
        if (scenario.contains(j)) {
            a.failed = true;
            auto it = std::lower_bound(scenario.indices.begin(),
                                       scenario.indices.end(), j);
            a.mu_tilde = scenario.values[it - scenario.indices.begin()];
            a.sigma_tilde = 0.0;
            continue;
        }
        try {
            const ConditionalStats cs = conditional_stats(cov, j, scenario);
            a.mu_tilde = cs.mu_tilde;
            a.sigma_tilde = std::sqrt(std::max(cs.sigma_tilde_sq, 0.0));
        } catch (const SingularConditioningError&) {
            a.mu_tilde = std::numeric_limits<double>::quiet_NaN();
            a.sigma_tilde = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return agents;
}

ResultRecord base_record(const ScenarioConfig& cfg, const std::string& command) {
    ResultRecord rec;
    rec.command = command;
    rec.config_echo = serialize_config(cfg);
    rec.seed = cfg.sim.seed;
    return rec;
}

}  // namespace

ResultRecord run_profile(const ScenarioConfig& config) {
    const WeightedGraph graph = config.build();
    const SpectralData s = spectral(graph.laplacian());
    const SteadyStateCovariance cov = steady_state_covariance(s, config.noise);
    const RiskParams p = effective_risk_params(config, cov);
    ResultRecord rec = base_record(config, "profile");
    rec.agents = profile_agents(cov, config.failures, p);
    return rec;
}

std::vector<ResultRecord> run_sweep(const ScenarioConfig& config) {
    const WeightedGraph graph = config.build();
    const SpectralData s = spectral(graph.laplacian());
    const SteadyStateCovariance cov = steady_state_covariance(s, config.noise);
    const RiskParams p = effective_risk_params(config, cov);
    std::vector<ResultRecord> records;
    for (const auto& point : config.sweep) {
        ResultRecord rec = base_record(config, "sweep");
        rec.sweep_label = point.label;
        try {
            FailureScenario scenario{point.indices, point.values};
            rec.agents = profile_agents(cov, scenario, p);
        } catch (const Error& e) {
            rec.error = e.what();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

ResultRecord run_sequence(const ScenarioConfig& config) {
    const WeightedGraph graph = config.build();
    const SpectralData s = spectral(graph.laplacian());
    const SteadyStateCovariance cov = steady_state_covariance(s, config.noise);
    const RiskParams p = effective_risk_params(config, cov);
    ResultRecord rec = base_record(config, "sequence");
    rec.sequence = most_vulnerable_sequence(cov, p, config.y_f_value,
                                            config.sequence_length,
                                            config.failures);
    return rec;
}

ResultRecord run_validate(const ScenarioConfig& config) {
    const WeightedGraph graph = config.build();
    const SpectralData s = spectral(graph.laplacian());
    const SteadyStateCovariance cov = steady_state_covariance(s, config.noise);
    const RiskParams p = effective_risk_params(config, cov);
    ResultRecord rec = base_record(config, "validate");
    const int n = graph.size();

    const EmpiricalStats emp = simulate(graph, config.noise, config.sim);
    double worst = 0.0;
    bool cov_pass = true;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double diff = std::abs(emp.cov_hat(i, j) - cov.sigma(i, j));
            const double se = emp.cov_se(i, j);
            if (se > 0.0) {
                worst = std::max(worst, diff / se);
                if (diff > 3.0 * se) cov_pass = false;
            } else if (diff > 1e-12) {
                cov_pass = false;
            }
        }
    }
    rec.validation_lines.push_back(
        std::string("covariance: ") + (cov_pass ? "pass" : "FAIL") +
        " (worst entry deviation " + format_double(worst) + " standard errors, " +
        std::to_string(emp.samples) + " samples)");
    rec.validation_passed = cov_pass;

    // Conditional-oracle check at delta* for the first conditionable agent
    // with a positive risk classification.
    if (config.noise.b != 0.0) {
        for (int j = 0; j < n; ++j) {
            if (config.failures.contains(j)) continue;
            ConditionalStats cs;
            try {
                cs = conditional_stats(cov, j, config.failures);
            } catch (const SingularConditioningError&) {
                continue;
            }
            const RiskValue rv = cascading_risk(cs, p);
            if (rv.classification != RiskClass::positive) continue;
            double band = config.oracle_band;
            if (band <= 0.0 && config.failures.count() > 0) {
                double min_sigma = std::numeric_limits<double>::infinity();
                for (int idx : config.failures.indices) {
                    min_sigma = std::min(min_sigma, cov.stddev(idx));
                }
                band = 0.05 * min_sigma;
            }
            const OracleEstimate est = conditional_risk_oracle(
                cov, j, config.failures, p, rv.value, band, config.oracle_count,
                config.sim.seed);
            const double dev = std::abs(est.probability - p.epsilon);
            const bool pass = dev <= 3.0 * est.std_error;
            rec.validation_lines.push_back(
                "conditional oracle (agent " + std::to_string(j + 1) +
                "): " + (pass ? "pass" : "FAIL") + " (estimate " +
                format_double(est.probability) + " vs epsilon " +
                format_double(p.epsilon) + ", std error " +
                format_double(est.std_error) + ", accepted " +
                std::to_string(est.accepted) + ")");
            if (!pass) rec.validation_passed = false;
            break;
        }
    }
    return rec;
}

namespace {

std::string risk_csv_value(const RiskValue& r) {
    return r.is_infinite() ? std::string("inf") : format_double(r.value);
}

json risk_json_value(const RiskValue& r) {
    if (r.is_infinite()) {
        return json{{"inf", true}, {"trigger", r.trigger}};
    }
    return json(r.value);
}

void append_agent_rows(std::ostringstream& out, const ResultRecord& rec,
                       const std::string& suffix) {
    for (const auto& a : rec.agents) {
        out << a.agent << ',' << (a.failed ? 1 : 0) << ','
            << risk_csv_value(a.risk) << ',' << (a.risk.is_infinite() ? 1 : 0)
            << ',' << format_double(a.mu_tilde) << ','
            << format_double(a.sigma_tilde) << suffix << '\n';
    }
}

json agents_json(const ResultRecord& rec) {
    json arr = json::array();
    for (const auto& a : rec.agents) {
        arr.push_back({{"agent", a.agent},
                       {"failed", a.failed},
                       {"risk", risk_json_value(a.risk)},
                       {"mu_tilde", a.mu_tilde},
                       {"sigma_tilde", a.sigma_tilde}});
    }
    return arr;
}

json record_json_object(const ResultRecord& rec) {
    json doc;
    doc["command"] = rec.command;
    doc["provenance"] = {{"tool_version", kToolVersion}, {"seed", rec.seed}};
    doc["config"] = json::parse(rec.config_echo);
    if (!rec.error.empty()) doc["error"] = rec.error;
    if (rec.command == "sequence") {
        json steps = json::array();
        for (std::size_t i = 0; i < rec.sequence.order.size(); ++i) {
            steps.push_back({{"step", i + 1},
                             {"agent", rec.sequence.order[i] + 1},
                             {"risk", risk_json_value(rec.sequence.risks[i])}});
        }
        doc["sequence"] = steps;
    } else if (rec.command == "validate") {
        doc["checks"] = rec.validation_lines;
        doc["passed"] = rec.validation_passed;
    } else {
        doc["agents"] = agents_json(rec);
        if (rec.command == "sweep") doc["sweep_point"] = rec.sweep_label;
    }
    return doc;
}

}  // namespace

std::string profile_csv(const ResultRecord& record) {
    std::ostringstream out;
    out << "agent,failed,risk,risk_is_inf,mu_tilde,sigma_tilde\n";
    append_agent_rows(out, record, "");
    return out.str();
}

std::string sweep_csv(const std::vector<ResultRecord>& records) {
    std::ostringstream out;
    out << "agent,failed,risk,risk_is_inf,mu_tilde,sigma_tilde,sweep_point\n";
    for (const auto& rec : records) {
        if (!rec.error.empty()) continue;
        append_agent_rows(out, rec, "," + rec.sweep_label);
    }
    return out.str();
}

std::string sequence_csv(const ResultRecord& record) {
    std::ostringstream out;
    out << "step,agent,risk\n";
    for (std::size_t i = 0; i < record.sequence.order.size(); ++i) {
        out << (i + 1) << ',' << (record.sequence.order[i] + 1) << ','
            << risk_csv_value(record.sequence.risks[i]) << '\n';
    }
    return out.str();
}

std::string validate_report(const ResultRecord& record) {
    std::ostringstream out;
    for (const auto& line : record.validation_lines) out << line << '\n';
    out << (record.validation_passed ? "validation passed" : "validation FAILED")
        << '\n';
    return out.str();
}

std::string record_json(const ResultRecord& record) {
    return record_json_object(record).dump(2) + "\n";
}

std::string sweep_json(const std::vector<ResultRecord>& records) {
    json arr = json::array();
    for (const auto& rec : records) arr.push_back(record_json_object(rec));
    return arr.dump(2) + "\n";
}

}  // namespace cascade
