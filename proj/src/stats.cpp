#include "cascade/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cascade {

double SteadyStateCovariance::stddev(int j) const {
    return std::sqrt(std::max(sigma(j, j), 0.0));
}

bool FailureScenario::contains(int j) const {
    return std::binary_search(indices.begin(), indices.end(), j);
}

FailureScenario FailureScenario::extended(int k, double y_fk) const {
    FailureScenario out = *this;
    auto pos = std::lower_bound(out.indices.begin(), out.indices.end(), k);
    auto offset = pos - out.indices.begin();
    out.indices.insert(pos, k);
    out.values.insert(out.values.begin() + offset, y_fk);
    return out;
}

void validate_scenario(const FailureScenario& scenario, int n) {
    if (scenario.indices.size() != scenario.values.size()) {
        throw ParameterError("failure scenario index/value length mismatch");
    }
    if (static_cast<int>(scenario.indices.size()) >= n) {
        throw ParameterError("failure scenario must leave at least one agent");
    }
    for (std::size_t r = 0; r < scenario.indices.size(); ++r) {
        int idx = scenario.indices[r];
        if (idx < 0 || idx >= n) {
            throw ParameterError("failed-agent index " + std::to_string(idx + 1) +
                                 " out of 1.." + std::to_string(n));
        }
        if (r > 0 && scenario.indices[r - 1] >= idx) {
            throw ParameterError("failed-agent indices must be strictly increasing");
        }
    }
}

SteadyStateCovariance steady_state_covariance(const SpectralData& s,
                                              const NoiseDelayConfig& cfg) {
    const int n = s.size();
    const double bound = max_stable_delay(s);
    if (!(cfg.tau >= 0.0) || cfg.tau >= bound) {
        throw StabilityError("tau=" + std::to_string(cfg.tau) +
                             " violates the delay bound pi/(2*lambda_n)=" +
                             std::to_string(bound));
    }
    // sigma_ij = (b^2/2) sum_{k>=2} cos(l_k tau)/(l_k(1 - sin(l_k tau))) q_k[i] q_k[j];
    // for k >= 2 the centering projection of q_k is q_k itself. Summation order
    // is ascending k so results are bitwise reproducible.
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
    const double half_b2 = 0.5 * cfg.b * cfg.b;
    for (int k = 1; k < n; ++k) {
        const double lk = s.lambdas(k);
        const double denom = lk * (1.0 - std::sin(lk * cfg.tau));
        const double factor = half_b2 * std::cos(lk * cfg.tau) / denom;
        sigma.noalias() += factor * s.Q.col(k) * s.Q.col(k).transpose();
    }
    return {std::move(sigma)};
}

double correlation(const SteadyStateCovariance& cov, int i, int j) {
    const double si = cov.sigma(i, i);
    const double sj = cov.sigma(j, j);
    if (si <= 0.0 || sj <= 0.0) {
        throw DegenerateError("correlation undefined for zero-variance agent");
    }
    if (i == j) return 1.0;
    return cov.sigma(i, j) / std::sqrt(si * sj);
}

namespace {

// Solve the failed-block system with an SPD factorization and a condition
// number guard; beyond the guard the scenario is ill-posed, not regularized.
struct ConditioningSolve {
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    Eigen::MatrixXd block;
};

ConditioningSolve factor_failed_block(const SteadyStateCovariance& cov,
                                      const FailureScenario& scenario) {
    const int m = scenario.count();
    Eigen::MatrixXd block(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            block(r, c) = cov.sigma(scenario.indices[r], scenario.indices[c]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block,
                                                      Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues()(0);
    const double emax = es.eigenvalues()(m - 1);
    if (emin <= 0.0 || emax / emin > kConditioningGuard) {
        throw SingularConditioningError(
            "failed-agent covariance block is singular or ill-conditioned");
    }
    ConditioningSolve out;
    out.block = std::move(block);
    out.ldlt.compute(out.block);
    if (out.ldlt.info() != Eigen::Success) {
        throw SingularConditioningError("failed-agent block factorization failed");
    }
    return out;
}

Eigen::VectorXd cross_column(const SteadyStateCovariance& cov, int j,
                             const FailureScenario& scenario) {
    Eigen::VectorXd v(scenario.count());
    for (int r = 0; r < scenario.count(); ++r)
        v(r) = cov.sigma(j, scenario.indices[r]);
    return v;
}

double clamp_variance(double v) {
    if (v < 0.0) {
        if (v < -1e-12) {
            throw NumericalError("conditional variance " + std::to_string(v) +
                                 " is negative beyond the clamping window");
        }
        return 0.0;
    }
    return v;
}

}  // namespace

ConditionalStats conditional_stats(const SteadyStateCovariance& cov, int j,
                                   const FailureScenario& scenario) {
    validate_scenario(scenario, cov.size());
    if (scenario.contains(j)) {
        throw IndexError("agent " + std::to_string(j + 1) +
                         " is already in the failure set");
    }
    if (scenario.count() == 0) {
        return {0.0, cov.sigma(j, j)};
    }
    auto solve = factor_failed_block(cov, scenario);
    const Eigen::VectorXd cross = cross_column(cov, j, scenario);
    const Eigen::VectorXd weights = solve.ldlt.solve(cross);
    Eigen::Map<const Eigen::VectorXd> yf(scenario.values.data(),
                                         scenario.count());
    ConditionalStats cs;
    cs.mu_tilde = weights.dot(yf);
    cs.sigma_tilde_sq = clamp_variance(cov.sigma(j, j) - weights.dot(cross));
    return cs;
}

ConditionalStats incremental_update(const SteadyStateCovariance& cov, int j,
                                    const FailureScenario& scenario, int k,
                                    double y_fk) {
    validate_scenario(scenario, cov.size());
    if (scenario.contains(j) || j == k) {
        throw IndexError("agent " + std::to_string(j + 1) +
                         " is already conditioned on");
    }
    if (scenario.contains(k)) {
        throw IndexError("new failure " + std::to_string(k + 1) +
                         " is already in the failure set");
    }
    double mu_j, var_j, mu_k, var_k, cross_jk;
    if (scenario.count() == 0) {
        mu_j = 0.0;
        var_j = cov.sigma(j, j);
        mu_k = 0.0;
        var_k = cov.sigma(k, k);
        cross_jk = cov.sigma(j, k);
    } else {
        auto solve = factor_failed_block(cov, scenario);
        const Eigen::VectorXd cj = cross_column(cov, j, scenario);
        const Eigen::VectorXd ck = cross_column(cov, k, scenario);
        const Eigen::VectorXd wj = solve.ldlt.solve(cj);
        const Eigen::VectorXd wk = solve.ldlt.solve(ck);
        Eigen::Map<const Eigen::VectorXd> yf(scenario.values.data(),
                                             scenario.count());
        mu_j = wj.dot(yf);
        var_j = clamp_variance(cov.sigma(j, j) - wj.dot(cj));
        mu_k = wk.dot(yf);
        var_k = clamp_variance(cov.sigma(k, k) - wk.dot(ck));
        cross_jk = cov.sigma(j, k) - wj.dot(ck);
    }
    if (var_k <= 0.0) {
        throw DegenerateUpdateError(
            "new failure is deterministic given the existing failures");
    }
    ConditionalStats cs;
    cs.mu_tilde = mu_j - (cross_jk / var_k) * (mu_k - y_fk);
    cs.sigma_tilde_sq = clamp_variance(var_j - cross_jk * cross_jk / var_k);
    return cs;
}

}  // namespace cascade
