#pragma once

#include "cnc/coding/factory.hpp"
#include "cnc/engine/engine.hpp"
#include "cnc/envs/environment.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cnc::harness {

struct EnvConfig {
    std::string kind = "minipong"; // minipong | blackjack | explicit
    int width = 16;
    int height = 16;
    int paddle_height = 3;
    double opponent_failure = 0.1;
    std::string mdp_path; // explicit MDPs
};

// Everything that determines a run. Defaults are the full-scale settings;
// desk-scale runs override them in their config files.
struct ExperimentConfig {
    std::string experiment = "control"; // eval-blackjack | control | oracle-cert | rate-test
    EnvConfig env;
    coding::ModelSpec state_model{"dirichlet", {}};
    coding::ModelSpec return_model{"dirichlet", {}};
    std::optional<std::size_t> horizon; // default depends on the experiment
    EpsilonSchedule epsilon;
    std::uint64_t seed = 1;
    std::size_t trials = 10;

    // eval-blackjack
    std::uint64_t episodes = 100000;
    std::vector<std::uint64_t> checkpoints; // empty: geometric 0,100,200,500,...

    // control
    std::uint64_t steps = 2000000;
    std::uint64_t log_every = 10000;
    std::size_t points_per_game = 21;
    std::size_t final_games = 50;
    std::string agent = "cnc"; // cnc | random
    bool baseline = true;      // also run the uniform-random agent

    // rate-test
    std::vector<std::uint64_t> sample_sizes{10000, 40000, 160000};

    // oracle-cert
    std::vector<std::string> corpus;
    std::size_t random_mdps = 100;
    std::size_t max_horizon = 4;
    double gap_tolerance = 1e-9;
};

// Parses a JSON config; unknown keys and bad values raise ConfigError.
// Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string &text, const std::string &base_dir = ".");
ExperimentConfig load_config(const std::string &path);
ExperimentConfig default_config(const std::string &experiment);

// Canonical JSON of a config (all defaults filled in) and its 64-bit FNV-1a
// hash in hex.
std::string canonical_json(const ExperimentConfig &cfg);
std::string config_hash(const ExperimentConfig &cfg);

std::unique_ptr<envs::Environment> make_environment(const EnvConfig &env);
// Policy stored in an explicit MDP file, or uniform.
envs::Policy explicit_policy(const EnvConfig &env);

// 0, 100, 200, 500, 1000, 2000, 5000, ... up to and including `last`.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t last);

} // namespace cnc::harness
