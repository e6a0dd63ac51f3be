#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cascade/graph.hpp"
#include "cascade/risk.hpp"
#include "cascade/simulator.hpp"

namespace cascade {

inline constexpr const char* kToolVersion = "0.1.0";

/// One sweep point: a placement of failed agents, all at the same value
/// unless per-agent values are given.
struct SweepPoint {
    std::vector<int> indices;
    std::vector<double> values;
    std::string label;
};

/// Parsed scenario file. Loading validates every module-level precondition
/// and reports all violations at once.
struct ScenarioConfig {
    GraphKind graph_kind = GraphKind::path;
    int n = 0;
    int p = 0;                       // pcycle only
    std::string edge_list_path;      // custom only
    NoiseDelayConfig noise;
    RiskParams risk;
    bool delta_max_given = false;    // otherwise defaulted from the covariance
    FailureScenario failures;
    double y_f_value = 0.0;
    int sequence_length = 0;
    std::vector<SweepPoint> sweep;
    SimConfig sim;
    double oracle_band = 0.0;        // 0 means default 0.05 * min failed sigma
    long oracle_count = 1000000;

    WeightedGraph build() const;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin);

/// Field-by-field serialization of the parsed config (round-trip check).
std::string serialize_config(const ScenarioConfig& cfg);

struct AgentResult {
    int agent = 0;  // 1-based in all outputs
    bool failed = false;
    RiskValue risk;
    double mu_tilde = 0.0;
    double sigma_tilde = 0.0;
};

struct ResultRecord {
    std::string command;
    std::string config_echo;
    std::uint64_t seed = 0;
    std::vector<AgentResult> agents;               // profile, sweep
    std::string sweep_label;                       // sweep only
    VulnerableSequence sequence;                   // sequence only
    std::vector<std::string> validation_lines;     // validate only
    bool validation_passed = true;
    std::string error;                             // per-sweep-point failure
};

ResultRecord run_profile(const ScenarioConfig& config);
std::vector<ResultRecord> run_sweep(const ScenarioConfig& config);
ResultRecord run_sequence(const ScenarioConfig& config);
ResultRecord run_validate(const ScenarioConfig& config);

std::string profile_csv(const ResultRecord& record);
std::string sweep_csv(const std::vector<ResultRecord>& records);
std::string sequence_csv(const ResultRecord& record);
std::string validate_report(const ResultRecord& record);
std::string record_json(const ResultRecord& record);
std::string sweep_json(const std::vector<ResultRecord>& records);

/// Full-precision decimal formatting (17 significant digits).
std::string format_double(double v);

}  // namespace cascade
