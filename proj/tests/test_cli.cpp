#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cascade/scenario.hpp"

using namespace cascade;

namespace {

const char* kCaseStudyComplete = R"({
  "graph": {"kind": "complete", "n": 20},
  "noise": {"b": 4.0, "tau": 0.05},
  "risk": {"c": 0.1, "epsilon": 0.1},
  "failures": {"indices": [9, 10, 11, 12], "value": 2.0}
})";

}  // namespace

TEST_CASE("config parsing and round-trip") {
    const auto cfg = parse_config(kCaseStudyComplete, "<test>");
    CHECK(cfg.graph_kind == GraphKind::complete);
    CHECK(cfg.n == 20);
    CHECK(cfg.noise.b == 4.0);
    CHECK(cfg.failures.indices == std::vector<int>{8, 9, 10, 11});
    CHECK(cfg.failures.values == std::vector<double>(4, 2.0));

    // serialize(parse(text)) parses back to the same fields.
    const auto again = parse_config(serialize_config(cfg), "<round-trip>");
    CHECK(again.graph_kind == cfg.graph_kind);
    CHECK(again.n == cfg.n);
    CHECK(again.noise.b == cfg.noise.b);
    CHECK(again.noise.tau == cfg.noise.tau);
    CHECK(again.risk.c == cfg.risk.c);
    CHECK(again.risk.epsilon == cfg.risk.epsilon);
    CHECK(again.failures.indices == cfg.failures.indices);
    CHECK(again.failures.values == cfg.failures.values);
    CHECK(serialize_config(again) == serialize_config(cfg));
}

TEST_CASE("every config violation is reported, not just the first") {
    const char* bad = R"({
      "graph": {"kind": "pcycle", "n": 1, "p": 0},
      "noise": {"b": 1.0, "tau": -0.1},
      "risk": {"c": -1.0, "epsilon": 2.0}
    })";
    try {
        parse_config(bad, "<test>");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("graph.n") != std::string::npos);
        CHECK(msg.find("noise.tau") != std::string::npos);
        CHECK(msg.find("risk.c") != std::string::npos);
        CHECK(msg.find("risk.epsilon") != std::string::npos);
    }
}

TEST_CASE("cross-cutting config checks") {
    SUBCASE("tau above the stability bound") {
        const char* cfg = R"({
          "graph": {"kind": "complete", "n": 20},
          "noise": {"b": 1.0, "tau": 0.1}
        })";
        CHECK_THROWS_AS(parse_config(cfg, "<test>"), ConfigError);
    }
    SUBCASE("failed value inside the tolerance band") {
        const char* cfg = R"({
          "graph": {"kind": "path", "n": 5},
          "noise": {"b": 1.0, "tau": 0.0},
          "risk": {"c": 0.1, "epsilon": 0.1},
          "failures": {"indices": [2], "value": 0.05}
        })";
        CHECK_THROWS_AS(parse_config(cfg, "<test>"), ConfigError);
    }
    SUBCASE("malformed JSON") {
        CHECK_THROWS_AS(parse_config("{not json", "<test>"), ConfigError);
    }
}

TEST_CASE("profile run on the complete-graph case study") {
    const auto cfg = parse_config(kCaseStudyComplete, "<test>");
    const auto rec = run_profile(cfg);
    REQUIRE(rec.agents.size() == 20);
    int zeros = 0;
    double ref = -1.0;
    for (const auto& a : rec.agents) {
        if (a.failed) {
            ++zeros;
            CHECK(a.risk.value == 0.0);
            CHECK(a.mu_tilde == 2.0);
        } else {
            if (ref < 0.0) ref = a.risk.value;
            CHECK(std::abs(a.risk.value - ref) < 1e-9);
            CHECK(a.risk.value > 0.0);
        }
    }
    CHECK(zeros == 4);
}

TEST_CASE("profile with no failures equals single-agent risks") {
    const char* text = R"({
      "graph": {"kind": "path", "n": 10},
      "noise": {"b": 2.0, "tau": 0.05},
      "risk": {"c": 0.1, "epsilon": 0.1}
    })";
    const auto cfg = parse_config(text, "<test>");
    const auto rec = run_profile(cfg);
    const auto cov = steady_state_covariance(
        spectral(cfg.build().laplacian()), cfg.noise);
    for (int j = 0; j < 10; ++j) {
        const auto expect = single_agent_risk(cov.stddev(j), cfg.risk);
        CHECK(std::abs(rec.agents[j].risk.value - expect.value) < 1e-10);
    }
}

TEST_CASE("profile output is byte-identical across runs") {
    const auto cfg = parse_config(kCaseStudyComplete, "<test>");
    const auto a = profile_csv(run_profile(cfg));
    const auto b = profile_csv(run_profile(cfg));
    CHECK(a == b);
    CHECK(record_json(run_profile(cfg)) == record_json(run_profile(cfg)));
    CHECK(a.substr(0, a.find('\n')) ==
          "agent,failed,risk,risk_is_inf,mu_tilde,sigma_tilde");
}

TEST_CASE("sweep placements on the complete graph give identical risks") {
    const char* text = R"({
      "graph": {"kind": "complete", "n": 20},
      "noise": {"b": 4.0, "tau": 0.05},
      "risk": {"c": 0.1, "epsilon": 0.1},
      "sweep": {"points": [
        {"indices": [1, 2, 3, 4], "value": 2.0, "label": "contiguous"},
        {"indices": [5, 9, 13, 17], "value": 2.0, "label": "spread"}
      ]}
    })";
    const auto recs = run_sweep(parse_config(text, "<test>"));
    REQUIRE(recs.size() == 2);
    double ref_a = -1, ref_b = -1;
    for (const auto& a : recs[0].agents)
        if (!a.failed) { ref_a = a.risk.value; break; }
    for (const auto& a : recs[1].agents)
        if (!a.failed) { ref_b = a.risk.value; break; }
    CHECK(std::abs(ref_a - ref_b) < 1e-9);

    const auto csv = sweep_csv(recs);
    CHECK(csv.find("sweep_point") != std::string::npos);
    CHECK(csv.find("contiguous") != std::string::npos);
    CHECK(csv.find("spread") != std::string::npos);
}

TEST_CASE("sweep with an empty point collapses to the plain profile") {
    const char* text = R"({
      "graph": {"kind": "path", "n": 8},
      "noise": {"b": 2.0, "tau": 0.05},
      "risk": {"c": 0.1, "epsilon": 0.1},
      "sweep": {"points": [{"indices": [], "label": "none"}]}
    })";
    const auto cfg = parse_config(text, "<test>");
    const auto recs = run_sweep(cfg);
    REQUIRE(recs.size() == 1);
    auto plain = cfg;
    plain.sweep.clear();
    const auto prof = run_profile(plain);
    for (int j = 0; j < 8; ++j) {
        CHECK(recs[0].agents[j].risk.value == prof.agents[j].risk.value);
    }
}

TEST_CASE("sequence run") {
    const char* text = R"({
      "graph": {"kind": "complete", "n": 12},
      "noise": {"b": 4.0, "tau": 0.05},
      "risk": {"c": 0.1, "epsilon": 0.1},
      "sequence": {"length": 4, "y_f_value": 2.0}
    })";
    const auto rec = run_sequence(parse_config(text, "<test>"));
    REQUIRE(rec.sequence.order.size() == 4);
    for (int step = 0; step < 4; ++step) CHECK(rec.sequence.order[step] == step);
    const auto csv = sequence_csv(rec);
    CHECK(csv.substr(0, csv.find('\n')) == "step,agent,risk");
    CHECK(csv.find("1,1,") != std::string::npos);
}

TEST_CASE("validate run on the 2-node benchmark") {
    const char* text = R"({
      "graph": {"kind": "path", "n": 2},
      "noise": {"b": 2.0, "tau": 0.0},
      "risk": {"c": 0.1, "epsilon": 0.1},
      "simulator": {"dt": 0.001, "horizon": 150.0, "burn_in": 10.0,
                    "trials": 40, "seed": 21, "count": 400000}
    })";
    const auto rec = run_validate(parse_config(text, "<test>"));
    CHECK(rec.validation_passed);
    REQUIRE(!rec.validation_lines.empty());
    CHECK(rec.validation_lines[0].find("covariance: pass") != std::string::npos);
}

TEST_CASE("validate run with b=0 passes trivially") {
    const char* text = R"({
      "graph": {"kind": "path", "n": 3},
      "noise": {"b": 0.0, "tau": 0.0},
      "simulator": {"dt": 0.001, "horizon": 5.0, "burn_in": 1.0,
                    "trials": 2, "seed": 1}
    })";
    const auto rec = run_validate(parse_config(text, "<test>"));
    CHECK(rec.validation_passed);
}

TEST_CASE("full precision formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    const double v = 1.4448949034988171;
    CHECK(std::stod(format_double(v)) == v);
}
