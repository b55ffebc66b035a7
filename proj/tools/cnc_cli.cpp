// Command-line front end: one subcommand per experiment.
//
//   cnc eval-blackjack --config cfg.json --out dir [--seed N] [--trials N]
//   cnc control        ...
//   cnc oracle-cert    ...
//   cnc rate-test      ...
//
// Exit codes: 0 success, 1 acceptance failure, 2 input error.

#include "cnc/error.hpp"
#include "cnc/harness/experiments.hpp"
#include "cnc/harness/manifest.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace cnc::harness;

namespace {

struct Common {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
};

void add_common(CLI::App *cmd, Common &c) {
    cmd->add_option("--config", c.config, "JSON experiment config (defaults when omitted)");
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
    cmd->add_option("--trials", c.trials, "Trial count (overrides the config)");
}

ExperimentConfig resolve(const std::string &experiment, const Common &c) {
    ExperimentConfig cfg = c.config.empty() ? default_config(experiment) : load_config(c.config);
    if (cfg.experiment != experiment) {
        throw cnc::ConfigError("config is for '" + cfg.experiment + "', not '" + experiment + "'");
    }
    if (c.seed) {
        cfg.seed = *c.seed;
    }
    if (c.trials) {
        if (*c.trials == 0) {
            throw cnc::ConfigError("trials must be at least 1");
        }
        cfg.trials = *c.trials;
    }
    fs::create_directories(c.out);
    std::ofstream manifest(fs::path(c.out) / "manifest.txt");
    write_manifest(manifest, cfg);
    return cfg;
}

std::ofstream open_out(const Common &c, const std::string &name) {
    std::ofstream f(fs::path(c.out) / name);
    if (!f) {
        throw cnc::InputError("cannot write " + (fs::path(c.out) / name).string());
    }
    return f;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Compress-and-control value estimation experiments"};
    app.require_subcommand(1);
    Common common;
    auto *eval = app.add_subcommand("eval-blackjack", "Blackjack policy evaluation, CNC vs first-visit Monte Carlo");
    auto *control = app.add_subcommand("control", "epsilon-greedy control on MiniPong or an explicit MDP");
    auto *cert = app.add_subcommand("oracle-cert", "Check the stationary-law Q against dynamic programming");
    auto *rate = app.add_subcommand("rate-test", "Q error decay with sample size on an explicit MDP");
    for (auto *cmd : {eval, control, cert, rate}) {
        add_common(cmd, common);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (eval->parsed()) {
            const auto cfg = resolve("eval-blackjack", common);
            const auto r = run_blackjack_eval(cfg);
            auto curve = open_out(common, "curve.csv");
            write_blackjack_curve(curve, r);
            auto trials = open_out(common, "trials.csv");
            write_blackjack_trials(trials, r);
            std::cout << "wrote " << r.checkpoints.size() << " checkpoints x " << r.trials.size()
                      << " trials to " << common.out << "\n";
            return 0;
        }
        if (control->parsed()) {
            const auto cfg = resolve("control", common);
            const auto r = run_control(cfg);
            auto curve = open_out(common, "curve.csv");
            write_control_curve(curve, r);
            auto trials = open_out(common, "trials.csv");
            write_control_trials(trials, r);
            auto summary = open_out(common, "summary.csv");
            write_control_summary(summary, r);
            for (const auto &a : r.agents) {
                std::cout << a.agent << ": final score " << a.final_mean() << " +- " << a.final_se() << "\n";
            }
            if (!std::isnan(r.advantage_in_se())) {
                std::cout << "advantage over random: " << r.advantage_in_se() << " standard errors\n";
            }
            return 0;
        }
        if (cert->parsed()) {
            const auto cfg = resolve("oracle-cert", common);
            const auto qdir = fs::path(common.out) / "oracle";
            fs::create_directories(qdir);
            const auto r = run_oracle_cert(cfg, qdir.string());
            auto report = open_out(common, "report.csv");
            write_cert_report(report, r);
            std::size_t ok = 0, excluded = 0;
            for (const auto &row : r.rows) {
                ok += row.status == "ok";
                excluded += row.status == "excluded";
            }
            std::cout << r.rows.size() << " MDPs: " << ok << " ok, " << excluded << " excluded, "
                      << r.rows.size() - ok - excluded << " failed\n";
            return r.passed() ? 0 : 1;
        }
        if (rate->parsed()) {
            const auto cfg = resolve("rate-test", common);
            const auto r = run_rate_test(cfg);
            auto report = open_out(common, "rate.csv");
            write_rate_report(report, r);
            for (std::size_t k = 0; k < r.ratios.size(); ++k) {
                std::cout << "n=" << r.sample_sizes[k] << " -> " << r.sample_sizes[k + 1]
                          << ": median error ratio " << r.ratios[k] << "\n";
            }
            return rate_within(r) ? 0 : 1;
        }
    } catch (const cnc::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cnc::ParseError &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const cnc::InputError &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
