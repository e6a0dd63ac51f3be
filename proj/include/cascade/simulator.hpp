#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "cascade/graph.hpp"
#include "cascade/risk.hpp"
#include "cascade/stats.hpp"

namespace cascade {

/// Euler-Maruyama settings for the delayed consensus dynamics.
/// The initial history is a constant vector over [-tau, 0] (zero by default).
struct SimConfig {
    double dt = 1e-3;
    double horizon = 100.0;
    double burn_in = 10.0;
    int trials = 1;
    std::uint64_t seed = 0;
    Eigen::VectorXd initial_history;  // empty means zeros

    /// Optional directory for per-trial trajectory CSV dumps (t, y_1..y_n).
    std::optional<std::string> trajectory_dir;

    /// Diagnostic-only escape hatch: run with tau past the stability bound
    /// to probe divergence. Normal runs keep this off.
    bool allow_unstable_tau = false;
};

/// Empirical moments of the observables with batch-means standard errors
/// (one batch per trial group, 20 batches).
struct EmpiricalStats {
    Eigen::MatrixXd cov_hat;
    Eigen::VectorXd mean_hat;
    Eigen::MatrixXd cov_se;
    long samples = 0;
};

/// Integrate dx = -L x(t - tau) dt + b dxi with a ring-buffer delay line and
/// accumulate the centered observables y = M_n x after burn-in. Per-trial
/// noise streams are seeded as splitmix64(seed ^ splitmix64(trial)), so the
/// result is independent of any execution schedule.
EmpiricalStats simulate(const WeightedGraph& g, const NoiseDelayConfig& cfg,
                        const SimConfig& sim);

/// Draw `count` vectors from N(0, Sigma) via the spectral square root of
/// Sigma. Rows are samples.
Eigen::MatrixXd sample_steady_state(const SteadyStateCovariance& cov,
                                    long count, std::uint64_t seed);

/// Samples from N(0, Sigma) surviving the rejection band
/// |y_i - y_f| < band for every failed agent. Throws
/// InsufficientAcceptanceError when fewer than min_accepted survive.
Eigen::MatrixXd accepted_samples(const SteadyStateCovariance& cov,
                                 const FailureScenario& scenario, double band,
                                 long count, std::uint64_t seed,
                                 long min_accepted = 1000);

struct OracleEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    long accepted = 0;
};

/// Rejection-band Monte Carlo estimate of
/// P{ |y_j| > delta + c  |  y_I within band of y_f } with its binomial
/// standard error.
OracleEstimate conditional_risk_oracle(const SteadyStateCovariance& cov, int j,
                                       const FailureScenario& scenario,
                                       const RiskParams& p, double delta,
                                       double band, long count,
                                       std::uint64_t seed);

}  // namespace cascade
