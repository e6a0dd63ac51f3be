#pragma once

#include <limits>
#include <string>
#include <vector>

#include "cascade/stats.hpp"

namespace cascade {

/// Consensus tolerance c, confidence parameter epsilon, and the ceiling past
/// which a risk search is reported as infinite.
struct RiskParams {
    double c = 0.1;
    double epsilon = 0.1;
    double delta_max = 1e9;
};

enum class RiskClass { zero, positive, infinite };

/// Value-at-risk of one agent. `trigger` records why an infinite
/// classification fired (ill-posed conditioning or ceiling).
struct RiskValue {
    double value = 0.0;
    RiskClass classification = RiskClass::zero;
    std::string trigger;

    bool is_infinite() const { return classification == RiskClass::infinite; }

    static RiskValue zero() { return {}; }
    static RiskValue finite(double v);
    static RiskValue infinite(std::string trigger);
};

/// Per-agent risk vector for a fixed failure scenario; failed agents carry
/// an exact zero.
struct RiskProfile {
    std::vector<RiskValue> values;
};

/// Greedy ordering of agents by successive conditional risk maximization.
struct VulnerableSequence {
    std::vector<int> order;
    std::vector<RiskValue> risks;
};

/// Inverse error function on (-1, 1). Rational initial guess polished by
/// Newton iterations on std::erf.
double erf_inv(double x);

/// P{ |y| > delta + c } for y ~ N(mu_tilde, sigma_tilde_sq). For a point
/// mass (sigma = 0) this is the indicator of |mu_tilde| > delta + c.
double exceedance_probability(const ConditionalStats& cs, double c, double delta);

/// Value-at-risk of a conditional law: 0 when the exceedance probability at
/// delta = 0 is already <= epsilon, otherwise the unique root of
/// exceedance_probability = epsilon found by bracketed bisection.
RiskValue cascading_risk(const ConditionalStats& cs, const RiskParams& p);

/// Closed-form unconditional risk: sqrt(2) * sigma_j * erf_inv(1 - eps) - c
/// when positive, else 0.
RiskValue single_agent_risk(double sigma_j, const RiskParams& p);

RiskProfile risk_profile(const SteadyStateCovariance& cov,
                         const FailureScenario& scenario, const RiskParams& p);

/// Greedy argmax sequence; ties broken by lowest agent index, infinite risks
/// outrank all finite ones. Each selected agent is appended to the scenario
/// with observable value y_f_value.
VulnerableSequence most_vulnerable_sequence(const SteadyStateCovariance& cov,
                                            const RiskParams& p,
                                            double y_f_value, int length,
                                            FailureScenario seed_scenario = {});

}  // namespace cascade
