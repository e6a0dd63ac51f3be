#include <doctest.h>

#include <cmath>
#include <iostream>

#include "cascade/simulator.hpp"
#include "helpers.hpp"

using namespace cascade;

namespace {

SimConfig quick_config(double dt, double horizon, double burn_in, int trials,
                       std::uint64_t seed) {
    SimConfig sim;
    sim.dt = dt;
    sim.horizon = horizon;
    sim.burn_in = burn_in;
    sim.trials = trials;
    sim.seed = seed;
    return sim;
}

}  // namespace

TEST_CASE("no noise, consensus initial condition is an equilibrium") {
    const auto g = build_path(4);
    SimConfig sim = quick_config(1e-3, 2.0, 0.0, 1, 1);
    sim.initial_history = Eigen::VectorXd::Constant(4, 3.7);
    const auto stats = simulate(g, {0.0, 0.02}, sim);
    CHECK(stats.cov_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(stats.mean_hat.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("no noise, arbitrary start decays to consensus") {
    const auto g = build_path(4);
    Eigen::VectorXd phi(4);
    phi << 1.0, -2.0, 0.5, 3.0;
    SimConfig sim = quick_config(1e-3, 60.0, 50.0, 1, 1);
    sim.initial_history = phi;
    const auto stats = simulate(g, {0.0, 0.02}, sim);
    CHECK(stats.mean_hat.cwiseAbs().maxCoeff() < 1e-3);
    CHECK(stats.cov_hat.cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("2-node covariance matches the analytical matrix") {
    const WeightedGraph g(2, {{0, 1, 1.0}});
    const auto stats =
        simulate(g, {2.0, 0.0}, quick_config(1e-3, 200.0, 10.0, 40, 7));
    Eigen::Matrix2d expected;
    expected << 0.5, -0.5, -0.5, 0.5;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double se = stats.cov_se(i, j);
            REQUIRE(se > 0.0);
            CHECK(std::abs(stats.cov_hat(i, j) - expected(i, j)) < 3.0 * se);
        }
    }
    CHECK(stats.mean_hat.cwiseAbs().maxCoeff() <
          5.0 * std::sqrt(0.5 / static_cast<double>(stats.samples)) * 10.0);
}

TEST_CASE("delayed dynamics match the analytical covariance") {
    const auto g = build_path(4);
    const SpectralData s = spectral(g.laplacian());
    const double tau = 0.5 * max_stable_delay(s);
    const auto cov = steady_state_covariance(s, {1.0, tau});
    const auto stats =
        simulate(g, {1.0, tau}, quick_config(tau / 25.0, 300.0, 20.0, 40, 11));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(stats.cov_hat(i, j) - cov.sigma(i, j)) <
                  3.0 * stats.cov_se(i, j) + 1e-12);
}

TEST_CASE("simulation is deterministic for a fixed seed") {
    const auto g = build_pcycle(6, 2);
    const SimConfig sim = quick_config(2e-3, 20.0, 2.0, 8, 123);
    const auto a = simulate(g, {1.5, 0.05}, sim);
    const auto b = simulate(g, {1.5, 0.05}, sim);
    CHECK(a.samples == b.samples);
    CHECK((a.cov_hat - b.cov_hat).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.mean_hat - b.mean_hat).cwiseAbs().maxCoeff() == 0.0);
    const auto c = simulate(g, {1.5, 0.05}, quick_config(2e-3, 20.0, 2.0, 8, 124));
    CHECK((a.cov_hat - c.cov_hat).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("halving dt moves entries by less than 2 combined standard errors") {
    const auto g = build_path(3);
    const SpectralData s = spectral(g.laplacian());
    const double tau = 0.4 * max_stable_delay(s);
    const auto coarse =
        simulate(g, {1.0, tau}, quick_config(tau / 40.0, 400.0, 20.0, 40, 5));
    const auto fine =
        simulate(g, {1.0, tau}, quick_config(tau / 80.0, 400.0, 20.0, 40, 5));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double combined =
                std::hypot(coarse.cov_se(i, j), fine.cov_se(i, j));
            CHECK(std::abs(coarse.cov_hat(i, j) - fine.cov_hat(i, j)) <
                  2.0 * combined + 1e-12);
        }
    }
}

TEST_CASE("config validation") {
    const auto g = build_path(3);
    CHECK_THROWS_AS(simulate(g, {1.0, 0.1}, quick_config(0.02, 10.0, 1.0, 1, 0)),
                    ParameterError);  // dt > tau/20
    CHECK_THROWS_AS(simulate(g, {1.0, 0.0}, quick_config(0.05, 10.0, 1.0, 1, 0)),
                    ParameterError);  // dt * lambda_n too large
    CHECK_THROWS_AS(simulate(g, {1.0, 0.0}, quick_config(1e-3, 10.0, 20.0, 1, 0)),
                    ParameterError);  // burn_in >= horizon
    CHECK_THROWS_AS(simulate(g, {1.0, 0.6}, quick_config(1e-2, 10.0, 1.0, 1, 0)),
                    StabilityError);  // tau above the bound
}

TEST_CASE("delay-bound sharpness probe (diagnostic, not asserted)") {
    const auto g = build_path(3);
    const double bound = max_stable_delay(spectral(g.laplacian()));
    SimConfig sim = quick_config(bound / 40.0, 2000.0, 10.0, 1, 3);
    sim.allow_unstable_tau = true;
    bool diverged = false;
    double var = 0.0;
    try {
        const auto stats = simulate(g, {1.0, 1.05 * bound}, sim);
        var = stats.cov_hat.trace();
    } catch (const DivergenceError&) {
        diverged = true;
    }
    MESSAGE("tau=1.05*bound probe: diverged=", diverged, " trace=", var);
    const auto stable = simulate(g, {1.0, 0.5 * bound},
                                 quick_config(bound / 40.0, 2000.0, 10.0, 1, 3));
    MESSAGE("tau=0.50*bound trace=", stable.cov_hat.trace());
    CHECK((diverged || var > 10.0 * stable.cov_hat.trace()));
}

TEST_CASE("steady-state sampling") {
    const WeightedGraph g(2, {{0, 1, 1.0}});
    const auto cov = steady_state_covariance(spectral(g.laplacian()), {2.0, 0.0});
    SUBCASE("count zero gives an empty set") {
        CHECK(sample_steady_state(cov, 0, 1).rows() == 0);
    }
    SUBCASE("zero covariance gives all-zero vectors") {
        const auto zero =
            steady_state_covariance(spectral(g.laplacian()), {0.0, 0.0});
        const auto draws = sample_steady_state(zero, 100, 1);
        CHECK(draws.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("rank-1 structure forces correlation -1") {
        const auto draws = sample_steady_state(cov, 1000000, 42);
        const Eigen::VectorXd mean = draws.colwise().mean();
        Eigen::MatrixXd centered = draws.rowwise() - mean.transpose();
        Eigen::Matrix2d emp =
            centered.transpose() * centered / static_cast<double>(draws.rows());
        const double rho = emp(0, 1) / std::sqrt(emp(0, 0) * emp(1, 1));
        CHECK(rho == doctest::Approx(-1.0).epsilon(1e-3));
        // Entrywise 5-standard-error agreement (iid draws).
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double se = std::sqrt(
                    (cov.sigma(i, i) * cov.sigma(j, j) +
                     cov.sigma(i, j) * cov.sigma(i, j)) /
                    static_cast<double>(draws.rows()));
                CHECK(std::abs(emp(i, j) - cov.sigma(i, j)) < 5.0 * se);
            }
    }
}

TEST_CASE("conditional risk oracle") {
    const auto g = build_path(6);
    const SpectralData s = spectral(g.laplacian());
    const auto cov = steady_state_covariance(s, {1.0, 0.3 * max_stable_delay(s)});
    RiskParams p{0.1, 0.1, 1e9};
    SUBCASE("marginal case matches the analytical exceedance") {
        ConditionalStats cs{0.0, cov.sigma(0, 0)};
        const double delta = 0.5;
        const auto est =
            conditional_risk_oracle(cov, 0, {}, p, delta, 0.1, 400000, 9);
        const double analytical = exceedance_probability(cs, p.c, delta);
        CHECK(std::abs(est.probability - analytical) < 3.0 * est.std_error);
    }
    SUBCASE("estimate at the analytical root is near epsilon") {
        FailureScenario scenario{{2}, {1.5}};
        const auto cs = conditional_stats(cov, 5, scenario);
        const auto rv = cascading_risk(cs, p);
        REQUIRE(rv.classification == RiskClass::positive);
        const double band = 0.05 * cov.stddev(2);
        const auto est = conditional_risk_oracle(cov, 5, scenario, p, rv.value,
                                                 band, 2000000, 17);
        CHECK(std::abs(est.probability - p.epsilon) < 3.0 * est.std_error);
        // Band-halving insensitivity.
        const auto half = conditional_risk_oracle(cov, 5, scenario, p, rv.value,
                                                  0.5 * band, 4000000, 18);
        CHECK(std::abs(est.probability - half.probability) <
              3.0 * std::hypot(est.std_error, half.std_error));
    }
    SUBCASE("insufficient acceptance raises with the rate attached") {
        FailureScenario scenario{{2}, {1.5}};
        try {
            conditional_risk_oracle(cov, 5, scenario, p, 0.5, 1e-6, 20000, 3);
            FAIL("expected InsufficientAcceptanceError");
        } catch (const InsufficientAcceptanceError& e) {
            CHECK(e.acceptance_rate < 0.05);
        }
    }
}
