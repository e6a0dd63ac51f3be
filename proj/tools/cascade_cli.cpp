#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cascade/scenario.hpp"

namespace {

// Exit codes are a stable contract: 0 success, 2 config error,
// 3 numerical/ill-posed error, 4 validation failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("CASCADE_OUT_DIR")) return env;
    return ".";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Value-at-risk analysis of cascading fluctuations in "
                 "time-delay consensus networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = default_out_dir();
    std::string format = "csv";
    std::int64_t seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "scenario config file (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed_override,
                        "override the config seed (simulator commands)");
    };

    CLI::App* profile = app.add_subcommand("profile", "cascading risk profile");
    CLI::App* sweep = app.add_subcommand("sweep", "profile across failure placements");
    CLI::App* sequence = app.add_subcommand("sequence", "most vulnerable sequence");
    CLI::App* validate = app.add_subcommand("validate", "Monte Carlo validation");
    for (auto* sub : {profile, sweep, sequence, validate}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        cascade::ScenarioConfig cfg = cascade::load_config(config_path);
        if (seed_override >= 0) {
            cfg.sim.seed = static_cast<std::uint64_t>(seed_override);
        }
        const std::filesystem::path dir(out_dir);
        const bool json = format == "json";

        if (profile->parsed()) {
            const auto rec = cascade::run_profile(cfg);
            write_file(dir / (json ? "profile.json" : "profile.csv"),
                       json ? cascade::record_json(rec)
                            : cascade::profile_csv(rec));
        } else if (sweep->parsed()) {
            const auto recs = cascade::run_sweep(cfg);
            for (const auto& rec : recs) {
                if (!rec.error.empty()) {
                    std::cerr << "sweep point '" << rec.sweep_label
                              << "' failed: " << rec.error << "\n";
                }
            }
            write_file(dir / (json ? "sweep.json" : "sweep.csv"),
                       json ? cascade::sweep_json(recs)
                            : cascade::sweep_csv(recs));
        } else if (sequence->parsed()) {
            const auto rec = cascade::run_sequence(cfg);
            write_file(dir / (json ? "sequence.json" : "sequence.csv"),
                       json ? cascade::record_json(rec)
                            : cascade::sequence_csv(rec));
        } else if (validate->parsed()) {
            const auto start = std::chrono::steady_clock::now();
            const auto rec = cascade::run_validate(cfg);
            const auto elapsed = std::chrono::duration<double>(
                std::chrono::steady_clock::now() - start);
            write_file(dir / (json ? "validate.json" : "validate.txt"),
                       json ? cascade::record_json(rec)
                            : cascade::validate_report(rec));
            std::cerr << cascade::validate_report(rec);
            std::cerr << "elapsed: " << elapsed.count() << " s\n";
            if (!rec.validation_passed) return kExitValidation;
        }
        return kExitOk;
    } catch (const cascade::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cascade::ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cascade::InsufficientAcceptanceError& e) {
        std::cerr << "validation error: " << e.what()
                  << " (acceptance rate " << e.acceptance_rate
                  << "); raise simulator.count or widen simulator.band\n";
        return kExitNumerical;
    } catch (const cascade::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
