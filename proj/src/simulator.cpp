#include "cascade/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace cascade {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(trial + 1)));
}

struct TrialMoments {
    Eigen::VectorXd sum;
    Eigen::MatrixXd sum_outer;
    long samples = 0;
};

void validate_sim_config(const SimConfig& sim, const NoiseDelayConfig& cfg,
                         double lambda_max, int n) {
    if (!(sim.dt > 0.0)) throw ParameterError("dt must be positive");
    if (!(sim.horizon > 0.0)) throw ParameterError("horizon must be positive");
    if (!(sim.burn_in >= 0.0 && sim.burn_in < sim.horizon)) {
        throw ParameterError("burn_in must lie in [0, horizon)");
    }
    if (sim.trials < 1) throw ParameterError("trials must be positive");
    if (cfg.tau > 0.0 && sim.dt > cfg.tau / 20.0) {
        throw ParameterError("dt must not exceed tau/20 for delay resolution");
    }
    if (sim.dt * lambda_max >= 0.1) {
        throw ParameterError("dt * lambda_n must stay below 0.1");
    }
    if (sim.initial_history.size() != 0 && sim.initial_history.size() != n) {
        throw ParameterError("initial_history length must equal the agent count");
    }
}

TrialMoments run_trial(const Eigen::MatrixXd& L, const NoiseDelayConfig& cfg,
                       const SimConfig& sim, int trial) {
    const int n = static_cast<int>(L.rows());
    auto rng = trial_rng(sim.seed, static_cast<std::uint64_t>(trial));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const long steps = std::lround(sim.horizon / sim.dt);
    const long burn_steps = std::lround(sim.burn_in / sim.dt);
    const int delay = cfg.tau > 0.0
                          ? static_cast<int>(std::lround(cfg.tau / sim.dt))
                          : 0;
    const int stride =
        cfg.tau > 0.0
            ? std::max(1, static_cast<int>(std::lround(0.1 * cfg.tau / sim.dt)))
            : 1;
    const double noise_scale = cfg.b * std::sqrt(sim.dt);

    Eigen::VectorXd x = sim.initial_history.size() == n
                            ? sim.initial_history
                            : Eigen::VectorXd::Zero(n);
    // Ring buffer of past states; constant initial history fills it.
    std::vector<Eigen::VectorXd> history(delay + 1, x);
    int head = 0;

    std::ofstream dump;
    if (sim.trajectory_dir) {
        std::filesystem::create_directories(*sim.trajectory_dir);
        dump.open(*sim.trajectory_dir + "/trial_" + std::to_string(trial) +
                  ".csv");
        dump << "t";
        for (int i = 0; i < n; ++i) dump << ",y_" << (i + 1);
        dump << "\n";
        dump.precision(17);
    }

    TrialMoments acc;
    acc.sum = Eigen::VectorXd::Zero(n);
    acc.sum_outer = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd noise(n), y(n);

    for (long step = 0; step < steps; ++step) {
        const int tail = (head + 1) % (delay + 1);
        const Eigen::VectorXd& x_delayed = history[tail];
        for (int i = 0; i < n; ++i) noise(i) = gauss(rng);
        x.noalias() -= sim.dt * (L * x_delayed);
        x.noalias() += noise_scale * noise;
        head = tail;
        history[head] = x;

        if (x.cwiseAbs().maxCoeff() > 1e8) {
            throw DivergenceError("state diverged (|x|_inf > 1e8)", step, trial);
        }
        if (step >= burn_steps && (step - burn_steps) % stride == 0) {
            y = x.array() - x.mean();
            acc.sum += y;
            acc.sum_outer.noalias() += y * y.transpose();
            ++acc.samples;
            if (dump.is_open()) {
                dump << (step + 1) * sim.dt;
                for (int i = 0; i < n; ++i) dump << "," << y(i);
                dump << "\n";
            }
        }
    }
    return acc;
}

}  // namespace

EmpiricalStats simulate(const WeightedGraph& g, const NoiseDelayConfig& cfg,
                        const SimConfig& sim) {
    const Eigen::MatrixXd L = g.laplacian();
    const SpectralData s = spectral(L);
    if (cfg.tau >= max_stable_delay(s) && !sim.allow_unstable_tau) {
        throw StabilityError("tau violates the delay bound pi/(2*lambda_n)");
    }
    validate_sim_config(sim, cfg, s.lambda_max(), g.size());

    const int n = g.size();
    std::vector<TrialMoments> per_trial(sim.trials);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = static_cast<int>(std::min<unsigned>(hw, sim.trials));
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int t = w; t < sim.trials; t += workers) {
                try {
                    per_trial[t] = run_trial(L, cfg, sim, t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    // Reduction in ascending trial order.
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd sum_outer = Eigen::MatrixXd::Zero(n, n);
    long total = 0;
    for (const auto& tm : per_trial) {
        sum += tm.sum;
        sum_outer += tm.sum_outer;
        total += tm.samples;
    }
    if (total == 0) throw ParameterError("no post-burn-in samples collected");

    EmpiricalStats out;
    out.samples = total;
    out.mean_hat = sum / static_cast<double>(total);
    out.cov_hat = sum_outer / static_cast<double>(total) -
                  out.mean_hat * out.mean_hat.transpose();

    // Batch-means standard errors: trials grouped into up to 20 batches.
    const int nb = std::min(20, sim.trials);
    std::vector<Eigen::MatrixXd> batch_cov;
    for (int b = 0; b < nb; ++b) {
        Eigen::VectorXd bs = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd bo = Eigen::MatrixXd::Zero(n, n);
        long bc = 0;
        for (int t = b * sim.trials / nb; t < (b + 1) * sim.trials / nb; ++t) {
            bs += per_trial[t].sum;
            bo += per_trial[t].sum_outer;
            bc += per_trial[t].samples;
        }
        if (bc == 0) continue;
        Eigen::VectorXd bm = bs / static_cast<double>(bc);
        batch_cov.push_back(bo / static_cast<double>(bc) - bm * bm.transpose());
    }
    out.cov_se = Eigen::MatrixXd::Zero(n, n);
    if (batch_cov.size() > 1) {
        Eigen::MatrixXd mean_cov = Eigen::MatrixXd::Zero(n, n);
        for (const auto& bc : batch_cov) mean_cov += bc;
        mean_cov /= static_cast<double>(batch_cov.size());
        Eigen::MatrixXd var = Eigen::MatrixXd::Zero(n, n);
        for (const auto& bc : batch_cov) {
            var += (bc - mean_cov).cwiseProduct(bc - mean_cov);
        }
        var /= static_cast<double>(batch_cov.size() - 1);
        out.cov_se = (var / static_cast<double>(batch_cov.size())).cwiseSqrt();
    }
    return out;
}

namespace {

// Spectral square root of Sigma with tiny negative eigenvalues clamped.
Eigen::MatrixXd covariance_factor(const SteadyStateCovariance& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.sigma);
    if (es.info() != Eigen::Success) {
        throw NumericalError("covariance eigensolve failed");
    }
    const Eigen::VectorXd& vals = es.eigenvalues();
    const double scale = std::max(vals.cwiseAbs().maxCoeff(), 1.0);
    Eigen::VectorXd roots(vals.size());
    for (int k = 0; k < vals.size(); ++k) {
        if (vals(k) < -1e-10 * scale) {
            throw NumericalError("covariance has a significantly negative eigenvalue");
        }
        roots(k) = std::sqrt(std::max(vals(k), 0.0));
    }
    return es.eigenvectors() * roots.asDiagonal();
}

}  // namespace

Eigen::MatrixXd sample_steady_state(const SteadyStateCovariance& cov,
                                    long count, std::uint64_t seed) {
    const int n = cov.size();
    const Eigen::MatrixXd factor = covariance_factor(cov);
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd out(count, n);
    Eigen::VectorXd z(n);
    for (long r = 0; r < count; ++r) {
        for (int k = 0; k < n; ++k) z(k) = gauss(rng);
        out.row(r) = (factor * z).transpose();
    }
    return out;
}

Eigen::MatrixXd accepted_samples(const SteadyStateCovariance& cov,
                                 const FailureScenario& scenario, double band,
                                 long count, std::uint64_t seed,
                                 long min_accepted) {
    validate_scenario(scenario, cov.size());
    if (!(band > 0.0)) throw ParameterError("rejection band must be positive");
    const int n = cov.size();
    const int m = scenario.count();
    const Eigen::MatrixXd factor = covariance_factor(cov);
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Eigen::VectorXd> kept;
    Eigen::VectorXd z(n), y(n);
    for (long r = 0; r < count; ++r) {
        for (int k = 0; k < n; ++k) z(k) = gauss(rng);
        y.noalias() = factor * z;
        bool ok = true;
        for (int t = 0; t < m; ++t) {
            if (std::abs(y(scenario.indices[t]) - scenario.values[t]) >= band) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(y);
    }
    if (static_cast<long>(kept.size()) < min_accepted) {
        throw InsufficientAcceptanceError(
            "only " + std::to_string(kept.size()) + " of " +
                std::to_string(count) + " samples survived the rejection band",
            static_cast<double>(kept.size()) / static_cast<double>(count));
    }
    Eigen::MatrixXd out(kept.size(), n);
    for (std::size_t r = 0; r < kept.size(); ++r) out.row(r) = kept[r];
    return out;
}

OracleEstimate conditional_risk_oracle(const SteadyStateCovariance& cov, int j,
                                       const FailureScenario& scenario,
                                       const RiskParams& p, double delta,
                                       double band, long count,
                                       std::uint64_t seed) {
    if (scenario.contains(j)) {
        throw IndexError("queried agent is in the failure set");
    }
    Eigen::MatrixXd samples =
        scenario.count() == 0
            ? sample_steady_state(cov, count, seed)
            : accepted_samples(cov, scenario, band, count, seed);
    const long accepted = samples.rows();
    long hits = 0;
    const double bound = delta + p.c;
    for (long r = 0; r < accepted; ++r) {
        if (std::abs(samples(r, j)) > bound) ++hits;
    }
    OracleEstimate est;
    est.accepted = accepted;
    est.probability = static_cast<double>(hits) / static_cast<double>(accepted);
    est.std_error = std::sqrt(
        std::max(est.probability * (1.0 - est.probability), 1e-12) /
        static_cast<double>(accepted));
    return est;
}

}  // namespace cascade
