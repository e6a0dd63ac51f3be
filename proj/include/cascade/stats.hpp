#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cascade/errors.hpp"
#include "cascade/graph.hpp"

namespace cascade {

/// Noise magnitude and communication delay. The covariance depends on b only
/// through b^2; tau must stay strictly below the stability bound of the graph.
struct NoiseDelayConfig {
    double b = 1.0;
    double tau = 0.0;
};

/// Steady-state covariance of the centered observables. Symmetric PSD with
/// rank n-1 on connected graphs; rows sum to zero.
struct SteadyStateCovariance {
    Eigen::MatrixXd sigma;

    int size() const { return static_cast<int>(sigma.rows()); }
    double variance(int j) const { return sigma(j, j); }
    double stddev(int j) const;
};

/// Ordered set of failed agents together with their observed values.
/// Indices are 0-based, strictly increasing, m < n.
struct FailureScenario {
    std::vector<int> indices;
    std::vector<double> values;

    int count() const { return static_cast<int>(indices.size()); }
    bool contains(int j) const;
    FailureScenario extended(int k, double y_fk) const;
};

void validate_scenario(const FailureScenario& scenario, int n);

/// Conditional mean and variance of one agent's observable given a
/// failure scenario.
struct ConditionalStats {
    double mu_tilde = 0.0;
    double sigma_tilde_sq = 0.0;
};

/// Condition-number guard for the failed-block solve; scenarios beyond it
/// are classified ill-posed rather than regularized.
inline constexpr double kConditioningGuard = 1e12;

SteadyStateCovariance steady_state_covariance(const SpectralData& s,
                                              const NoiseDelayConfig& cfg);

double correlation(const SteadyStateCovariance& cov, int i, int j);

ConditionalStats conditional_stats(const SteadyStateCovariance& cov, int j,
                                   const FailureScenario& scenario);

/// One-new-failure recursion: conditional stats of agent j after agent k is
/// added to the scenario with value y_fk, computed from the m-failure
/// quantities without re-solving the enlarged block.
ConditionalStats incremental_update(const SteadyStateCovariance& cov, int j,
                                    const FailureScenario& scenario, int k,
                                    double y_fk);

}  // namespace cascade
