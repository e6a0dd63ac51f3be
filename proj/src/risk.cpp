#include "cascade/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cascade {

RiskValue RiskValue::finite(double v) {
    RiskValue r;
    r.value = v;
    r.classification = v > 0.0 ? RiskClass::positive : RiskClass::zero;
    return r;
}

RiskValue RiskValue::infinite(std::string trigger) {
    RiskValue r;
    r.value = std::numeric_limits<double>::infinity();
    r.classification = RiskClass::infinite;
    r.trigger = std::move(trigger);
    return r;
}

double erf_inv(double x) {
    if (!(x > -1.0 && x < 1.0)) {
        throw ParameterError("erf_inv argument must lie in (-1, 1)");
    }
    if (x == 0.0) return 0.0;
    // Winitzki-style initial guess, then Newton on std::erf.
    const double a = 0.147;
    const double ln1mx2 = std::log(1.0 - x * x);
    const double t1 = 2.0 / (std::numbers::pi * a) + 0.5 * ln1mx2;
    double y = std::copysign(
        std::sqrt(std::sqrt(t1 * t1 - ln1mx2 / a) - t1), x);
    const double two_over_sqrt_pi = 2.0 / std::sqrt(std::numbers::pi);
    for (int it = 0; it < 6; ++it) {
        const double err = std::erf(y) - x;
        const double deriv = two_over_sqrt_pi * std::exp(-y * y);
        if (deriv == 0.0) break;
        const double step = err / deriv;
        y -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(y))) break;
    }
    return y;
}

double exceedance_probability(const ConditionalStats& cs, double c,
                              double delta) {
    const double bound = delta + c;
    if (cs.sigma_tilde_sq <= 0.0) {
        return std::abs(cs.mu_tilde) > bound ? 1.0 : 0.0;
    }
    const double denom = std::numbers::sqrt2 * std::sqrt(cs.sigma_tilde_sq);
    const double kp = (bound + cs.mu_tilde) / denom;
    const double km = (bound - cs.mu_tilde) / denom;
    double p = 1.0 - 0.5 * (std::erf(kp) + std::erf(km));
    return std::clamp(p, 0.0, 1.0);
}

RiskValue cascading_risk(const ConditionalStats& cs, const RiskParams& p) {
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) {
        throw ParameterError("epsilon must lie in (0, 1)");
    }
    if (!(p.c > 0.0)) {
        throw ParameterError("consensus tolerance c must be positive");
    }
    if (exceedance_probability(cs, p.c, 0.0) <= p.epsilon) {
        return RiskValue::zero();
    }
    if (exceedance_probability(cs, p.c, p.delta_max) >= p.epsilon) {
        return RiskValue::infinite("bracket exceeded delta_max");
    }
    const double sigma = std::sqrt(std::max(cs.sigma_tilde_sq, 0.0));
    if (sigma == 0.0) {
        // Point mass outside the band: the exceedance drops to 0 exactly at
        // |mu| - c.
        return RiskValue::finite(std::abs(cs.mu_tilde) - p.c);
    }
    // Bracket then bisect; the objective is strictly decreasing in delta.
    double lo = 0.0;
    double hi = std::min(std::numbers::sqrt2 * sigma * erf_inv(1.0 - p.epsilon) +
                             std::abs(cs.mu_tilde) + p.c,
                         p.delta_max);
    while (exceedance_probability(cs, p.c, hi) >= p.epsilon) {
        hi = std::min(2.0 * hi, p.delta_max);
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (exceedance_probability(cs, p.c, mid) < p.epsilon) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return RiskValue::finite(0.5 * (lo + hi));
}

RiskValue single_agent_risk(double sigma_j, const RiskParams& p) {
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) {
        throw ParameterError("epsilon must lie in (0, 1)");
    }
    const double iota = erf_inv(1.0 - p.epsilon);
    if (sigma_j > p.c / (std::numbers::sqrt2 * iota)) {
        return RiskValue::finite(std::numbers::sqrt2 * sigma_j * iota - p.c);
    }
    return RiskValue::zero();
}

RiskProfile risk_profile(const SteadyStateCovariance& cov,
                         const FailureScenario& scenario, const RiskParams& p) {
    const int n = cov.size();
    validate_scenario(scenario, n);
    RiskProfile profile;
    profile.values.resize(n);
    for (int j = 0; j < n; ++j) {
        if (scenario.contains(j)) {
            profile.values[j] = RiskValue::zero();
            continue;
        }
        try {
            profile.values[j] = cascading_risk(conditional_stats(cov, j, scenario), p);
        } catch (const SingularConditioningError&) {
            profile.values[j] = RiskValue::infinite("ill-posed conditioning");
        }
    }
    return profile;
}

namespace {

// Ordering for the greedy argmax: infinite beats finite, larger beats
// smaller, ties go to the lower agent index (callers scan ascending).
// Values within 1e-12 relative count as ties so that symmetric graphs
// produce the canonical ascending order.
bool beats(const RiskValue& challenger, const RiskValue& incumbent) {
    const bool ci = challenger.is_infinite();
    const bool ii = incumbent.is_infinite();
    if (ci != ii) return ci;
    if (ci && ii) return false;
    const double tol = 1e-12 * std::max({1.0, challenger.value, incumbent.value});
    return challenger.value > incumbent.value + tol;
}

}  // namespace

VulnerableSequence most_vulnerable_sequence(const SteadyStateCovariance& cov,
                                            const RiskParams& p,
                                            double y_f_value, int length,
                                            FailureScenario seed_scenario) {
    const int n = cov.size();
    validate_scenario(seed_scenario, n);
    if (!(std::abs(y_f_value) > p.c)) {
        throw ParameterError("|y_f_value| must exceed the tolerance c");
    }
    if (length < 1 || length > n - seed_scenario.count()) {
        throw ParameterError("sequence length out of range");
    }
    VulnerableSequence seq;
    FailureScenario scenario = std::move(seed_scenario);
    for (int step = 0; step < length; ++step) {
        int best = -1;
        RiskValue best_risk;
        for (int j = 0; j < n; ++j) {
            if (scenario.contains(j)) continue;
            RiskValue r;
            try {
                r = cascading_risk(conditional_stats(cov, j, scenario), p);
            } catch (const SingularConditioningError&) {
                r = RiskValue::infinite("ill-posed conditioning");
            }
            if (best < 0 || beats(r, best_risk)) {
                best = j;
                best_risk = r;
            }
        }
        seq.order.push_back(best);
        seq.risks.push_back(best_risk);
        scenario = scenario.extended(best, y_f_value);
    }
    return seq;
}

}  // namespace cascade
