#include "cnc/harness/config.hpp"

#include "cnc/envs/blackjack.hpp"
#include "cnc/envs/explicit_mdp.hpp"
#include "cnc/envs/minipong.hpp"
#include "cnc/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace cnc::harness {

using nlohmann::json;

namespace {

const std::set<std::string> kExperiments{"eval-blackjack", "control", "oracle-cert", "rate-test"};

void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto &[k, v] : obj.items()) {
        if (!allowed.count(k)) {
            throw ConfigError("unknown key '" + k + "' in " + where);
        }
    }
}

template <class T> T get(const json &obj, const std::string &key, T fallback, const std::string &where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError("bad value for '" + key + "' in " + where);
    }
}

std::uint64_t get_count(const json &obj, const std::string &key, std::uint64_t fallback,
                        const std::string &where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto &v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ConfigError("'" + key + "' in " + where + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

coding::ModelSpec parse_model(const json &obj, const std::string &where, bool state_model) {
    if (!obj.is_object() || !obj.contains("kind") || !obj.at("kind").is_string()) {
        throw ConfigError(where + " needs a string 'kind'");
    }
    coding::ModelSpec spec;
    spec.kind = obj.at("kind").get<std::string>();
    for (const auto &[k, v] : obj.items()) {
        if (k == "kind") {
            continue;
        }
        if (!v.is_number()) {
            throw ConfigError("hyperparameter '" + k + "' in " + where + " must be a number");
        }
        spec.params[k] = v.get<double>();
    }
    coding::validate_spec(spec, state_model);
    return spec;
}

json model_json(const coding::ModelSpec &spec) {
    json j;
    j["kind"] = spec.kind;
    for (const auto &[k, v] : spec.params) {
        j[k] = v;
    }
    return j;
}

} // namespace

ExperimentConfig default_config(const std::string &experiment) {
    if (!kExperiments.count(experiment)) {
        throw ConfigError("unknown experiment '" + experiment + "'");
    }
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "eval-blackjack") {
        c.env.kind = "blackjack";
    } else if (experiment == "control") {
        c.env.kind = "minipong";
        c.state_model = {"factored-sad", {}};
        c.return_model = {"sad", {}};
        c.horizon = 80;
    } else if (experiment == "rate-test") {
        c.env.kind = "explicit";
        c.state_model = {"frequency", {}};
        c.return_model = {"frequency", {}};
        c.trials = 30;
        c.horizon = 2;
    } else {
        c.env.kind = "explicit";
        c.trials = 1;
    }
    return c;
}

ExperimentConfig parse_config(const std::string &text, const std::string &base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root,
               {"experiment", "env", "state_model", "return_model", "horizon", "epsilon", "seed",
                "trials", "episodes", "checkpoints", "steps", "log_every", "points_per_game",
                "final_games", "agent", "baseline", "sample_sizes", "corpus", "random_mdps",
                "max_horizon", "gap_tolerance"},
               "config");
    if (!root.contains("experiment") || !root.at("experiment").is_string()) {
        throw ConfigError("config needs a string 'experiment'");
    }
    ExperimentConfig c = default_config(root.at("experiment").get<std::string>());
    const std::string w = "config";

    if (root.contains("env")) {
        const auto &e = root.at("env");
        check_keys(e, {"kind", "width", "height", "paddle_height", "opponent_failure", "mdp"}, "env");
        c.env.kind = get<std::string>(e, "kind", c.env.kind, "env");
        c.env.width = get<int>(e, "width", c.env.width, "env");
        c.env.height = get<int>(e, "height", c.env.height, "env");
        c.env.paddle_height = get<int>(e, "paddle_height", c.env.paddle_height, "env");
        c.env.opponent_failure = get<double>(e, "opponent_failure", c.env.opponent_failure, "env");
        if (e.contains("mdp")) {
            std::filesystem::path p = get<std::string>(e, "mdp", "", "env");
            if (!p.empty()) {
                c.env.mdp_path = (p.is_absolute() ? p : std::filesystem::path(base_dir) / p)
                                     .lexically_normal()
                                     .string();
            }
        }
    }
    if (c.env.kind != "minipong" && c.env.kind != "blackjack" && c.env.kind != "explicit") {
        throw ConfigError("unknown env kind '" + c.env.kind + "'");
    }
    if (root.contains("state_model")) {
        c.state_model = parse_model(root.at("state_model"), "state_model", true);
    }
    if (root.contains("return_model")) {
        c.return_model = parse_model(root.at("return_model"), "return_model", false);
    }
    if (root.contains("horizon")) {
        c.horizon = get_count(root, "horizon", 0, w);
        if (*c.horizon == 0) {
            throw ConfigError("horizon must be at least 1");
        }
    }
    if (root.contains("epsilon")) {
        const auto &e = root.at("epsilon");
        check_keys(e, {"start", "end", "decay_steps"}, "epsilon");
        c.epsilon.start = get<double>(e, "start", c.epsilon.start, "epsilon");
        c.epsilon.end = get<double>(e, "end", c.epsilon.end, "epsilon");
        c.epsilon.decay_steps = get_count(e, "decay_steps", c.epsilon.decay_steps, "epsilon");
        if (c.epsilon.start < 0 || c.epsilon.start > 1 || c.epsilon.end < 0 || c.epsilon.end > 1) {
            throw ConfigError("epsilon values must lie in [0, 1]");
        }
    }
    c.seed = get_count(root, "seed", c.seed, w);
    c.trials = get_count(root, "trials", c.trials, w);
    if (c.trials == 0) {
        throw ConfigError("trials must be at least 1");
    }
    c.episodes = get_count(root, "episodes", c.episodes, w);
    c.steps = get_count(root, "steps", c.steps, w);
    c.log_every = get_count(root, "log_every", c.log_every, w);
    if (c.log_every == 0) {
        throw ConfigError("log_every must be at least 1");
    }
    c.points_per_game = get_count(root, "points_per_game", c.points_per_game, w);
    c.final_games = get_count(root, "final_games", c.final_games, w);
    c.agent = get<std::string>(root, "agent", c.agent, w);
    if (c.agent != "cnc" && c.agent != "random") {
        throw ConfigError("agent must be 'cnc' or 'random'");
    }
    c.baseline = get<bool>(root, "baseline", c.baseline, w);
    if (root.contains("checkpoints")) {
        c.checkpoints = get<std::vector<std::uint64_t>>(root, "checkpoints", {}, w);
    }
    if (root.contains("sample_sizes")) {
        c.sample_sizes = get<std::vector<std::uint64_t>>(root, "sample_sizes", {}, w);
        if (c.sample_sizes.empty()) {
            throw ConfigError("sample_sizes must not be empty");
        }
    }
    if (root.contains("corpus")) {
        for (const auto &p : get<std::vector<std::string>>(root, "corpus", {}, w)) {
            std::filesystem::path fp = p;
            c.corpus.push_back(
                (fp.is_absolute() ? fp : std::filesystem::path(base_dir) / fp).lexically_normal().string());
        }
    }
    c.random_mdps = get_count(root, "random_mdps", c.random_mdps, w);
    c.max_horizon = get_count(root, "max_horizon", c.max_horizon, w);
    c.gap_tolerance = get<double>(root, "gap_tolerance", c.gap_tolerance, w);
    if (c.env.kind == "explicit" && c.env.mdp_path.empty() && c.experiment != "oracle-cert") {
        throw ConfigError("explicit env needs an 'mdp' path");
    }
    return c;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string canonical_json(const ExperimentConfig &c) {
    json j;
    j["experiment"] = c.experiment;
    j["env"] = {{"kind", c.env.kind},
                {"width", c.env.width},
                {"height", c.env.height},
                {"paddle_height", c.env.paddle_height},
                {"opponent_failure", c.env.opponent_failure},
                {"mdp", c.env.mdp_path}};
    j["state_model"] = model_json(c.state_model);
    j["return_model"] = model_json(c.return_model);
    j["horizon"] = c.horizon ? json(*c.horizon) : json(nullptr);
    j["epsilon"] = {{"start", c.epsilon.start}, {"end", c.epsilon.end}, {"decay_steps", c.epsilon.decay_steps}};
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["episodes"] = c.episodes;
    j["checkpoints"] = c.checkpoints;
    j["steps"] = c.steps;
    j["log_every"] = c.log_every;
    j["points_per_game"] = c.points_per_game;
    j["final_games"] = c.final_games;
    j["agent"] = c.agent;
    j["baseline"] = c.baseline;
    j["sample_sizes"] = c.sample_sizes;
    j["corpus"] = c.corpus;
    j["random_mdps"] = c.random_mdps;
    j["max_horizon"] = c.max_horizon;
    j["gap_tolerance"] = c.gap_tolerance;
    return j.dump(); // nlohmann::json objects keep keys sorted
}

std::string config_hash(const ExperimentConfig &c) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : canonical_json(c)) {
        h = (h ^ ch) * 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::unique_ptr<envs::Environment> make_environment(const EnvConfig &env) {
    if (env.kind == "blackjack") {
        return std::make_unique<envs::Blackjack>();
    }
    if (env.kind == "minipong") {
        return std::make_unique<envs::MiniPong>(
            envs::MiniPongOptions{env.width, env.height, env.paddle_height, env.opponent_failure});
    }
    if (env.kind == "explicit") {
        return std::make_unique<envs::ExplicitMdp>(envs::load_explicit_mdp(env.mdp_path).mdp);
    }
    throw ConfigError("unknown env kind '" + env.kind + "'");
}

envs::Policy explicit_policy(const EnvConfig &env) {
    auto file = envs::load_explicit_mdp(env.mdp_path);
    if (file.policy) {
        return *file.policy;
    }
    return envs::Policy(file.mdp.num_actions());
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t last) {
    std::vector<std::uint64_t> out{0};
    for (std::uint64_t decade = 100;; decade *= 10) {
        for (std::uint64_t k : {1, 2, 5}) {
            const std::uint64_t v = k * decade;
            if (v > last) {
                if (out.back() != last) {
                    out.push_back(last);
                }
                return out;
            }
            out.push_back(v);
        }
    }
}

} // namespace cnc::harness
