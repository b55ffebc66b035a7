#include "cnc/harness/experiments.hpp"

#include "cnc/error.hpp"
#include "cnc/harness/stats.hpp"
#include "cnc/harness/trials.hpp"

#include <cmath>
#include <ostream>

namespace cnc::harness {

namespace {

ControlTrial run_one(const ExperimentConfig &cfg, const envs::Environment &env, bool use_cnc,
                     std::size_t m, std::size_t trial) {
    const std::uint64_t seed = derive_seed(cfg.seed, "trial", trial);
    Rng env_rng(derive_seed(seed, "env"));
    Rng policy_rng(derive_seed(seed, "policy"));
    std::unique_ptr<Engine> engine;
    if (use_cnc) {
        EngineOptions opts;
        opts.horizon = m;
        opts.state_model = cfg.state_model;
        opts.return_model = cfg.return_model;
        opts.epsilon = cfg.epsilon;
        opts.seed = derive_seed(seed, "policy");
        engine = std::make_unique<Engine>(env, opts);
    }

    ControlTrial out;
    envs::StateIndex s = env.initial_state(env_rng);
    if (engine) {
        engine->begin_episode(s);
    }
    std::uint64_t agent_points = 0;
    std::uint64_t opponent_points = 0;
    double episode_return = 0.0;
    double interval_reward = 0.0;
    double interval_scores = 0.0;
    std::uint64_t interval_games = 0;
    std::uint64_t interval_start = 0;

    auto finish_game = [&](double score) {
        out.game_scores.push_back(score);
        interval_scores += score;
        ++interval_games;
    };

    for (std::uint64_t t = 0; t < cfg.steps; ++t) {
        const envs::Action a = engine ? engine->epsilon_greedy_action(s, t)
                                      : static_cast<envs::Action>(uniform_index(policy_rng, env.num_actions()));
        const auto r = env.step(s, a, env_rng);
        if (engine) {
            engine->observe(a, r.next, r.reward, r.terminal);
        }
        interval_reward += r.reward;
        if (env.episodic()) {
            episode_return += r.reward;
            if (r.terminal) {
                finish_game(episode_return);
                episode_return = 0.0;
            }
        } else if (r.reward != 0.0) {
            (r.reward > 0.0 ? agent_points : opponent_points) += 1;
            if (agent_points >= cfg.points_per_game || opponent_points >= cfg.points_per_game) {
                finish_game(static_cast<double>(agent_points) - static_cast<double>(opponent_points));
                agent_points = opponent_points = 0;
            }
        }
        if (r.terminal) {
            s = env.initial_state(env_rng);
            if (engine) {
                engine->begin_episode(s);
            }
        } else {
            s = r.next;
        }
        if ((t + 1) % cfg.log_every == 0 || t + 1 == cfg.steps) {
            ControlPoint p;
            p.step = t + 1;
            p.games = out.game_scores.size();
            p.avg_reward = interval_reward / static_cast<double>(t + 1 - interval_start);
            p.game_score = interval_games ? interval_scores / static_cast<double>(interval_games)
                                          : std::nan("");
            p.epsilon = engine ? cfg.epsilon.at(t) : 1.0;
            out.curve.push_back(p);
            interval_reward = interval_scores = 0.0;
            interval_games = 0;
            interval_start = t + 1;
        }
    }
    const std::size_t n = out.game_scores.size();
    const std::size_t k = std::min(n, cfg.final_games);
    out.final_score = k ? mean(std::span(out.game_scores).subspan(n - k)) : std::nan("");
    out.degenerate = engine ? engine->degenerate_posteriors() : 0;
    return out;
}

} // namespace

double AgentRuns::final_mean() const {
    std::vector<double> xs;
    for (const auto &t : trials) {
        xs.push_back(t.final_score);
    }
    return mean(xs);
}

double AgentRuns::final_se() const {
    std::vector<double> xs;
    for (const auto &t : trials) {
        xs.push_back(t.final_score);
    }
    return standard_error(xs);
}

double ControlResult::advantage_in_se() const {
    const AgentRuns *cnc = nullptr;
    const AgentRuns *rnd = nullptr;
    for (const auto &a : agents) {
        (a.agent == "cnc" ? cnc : rnd) = &a;
    }
    if (!cnc || !rnd) {
        return std::nan("");
    }
    const double se = std::hypot(cnc->final_se(), rnd->final_se());
    const double diff = cnc->final_mean() - rnd->final_mean();
    if (se == 0.0) {
        return diff > 0 ? INFINITY : diff < 0 ? -INFINITY : 0.0;
    }
    return diff / se;
}

ControlResult run_control(const ExperimentConfig &cfg) {
    const auto env = make_environment(cfg.env);
    const std::size_t m = cfg.horizon.value_or(80);
    std::vector<std::string> agents{cfg.agent};
    if (cfg.agent == "cnc" && cfg.baseline) {
        agents.push_back("random");
    }
    if (cfg.steps == 0) {
        throw ConfigError("control needs at least one step");
    }
    ControlResult res;
    for (const auto &agent : agents) {
        AgentRuns runs;
        runs.agent = agent;
        runs.trials = run_trials<ControlTrial>(cfg.trials, [&](std::size_t trial) {
            return run_one(cfg, *env, agent == "cnc", m, trial);
        });
        res.agents.push_back(std::move(runs));
    }
    return res;
}

void write_control_curve(std::ostream &out, const ControlResult &r) {
    out << "agent,step,games,avg_reward,avg_reward_se,game_score,game_score_se,epsilon\n";
    for (const auto &a : r.agents) {
        if (a.trials.empty()) {
            continue;
        }
        for (std::size_t k = 0; k < a.trials[0].curve.size(); ++k) {
            std::vector<double> rew, score, games;
            for (const auto &t : a.trials) {
                rew.push_back(t.curve[k].avg_reward);
                games.push_back(static_cast<double>(t.curve[k].games));
                if (!std::isnan(t.curve[k].game_score)) {
                    score.push_back(t.curve[k].game_score);
                }
            }
            const auto &p = a.trials[0].curve[k];
            out << a.agent << ',' << p.step << ',' << format_double(mean(games)) << ','
                << format_double(mean(rew)) << ',' << format_double(standard_error(rew)) << ','
                << format_double(mean(score)) << ',' << format_double(standard_error(score)) << ','
                << format_double(p.epsilon) << '\n';
        }
    }
}

void write_control_trials(std::ostream &out, const ControlResult &r) {
    out << "agent,trial,step,games,avg_reward,game_score,epsilon\n";
    for (const auto &a : r.agents) {
        for (std::size_t t = 0; t < a.trials.size(); ++t) {
            for (const auto &p : a.trials[t].curve) {
                out << a.agent << ',' << t << ',' << p.step << ',' << p.games << ','
                    << format_double(p.avg_reward) << ',' << format_double(p.game_score) << ','
                    << format_double(p.epsilon) << '\n';
            }
        }
    }
}

void write_control_summary(std::ostream &out, const ControlResult &r) {
    out << "agent,trial,games,final_score,degenerate_posteriors\n";
    for (const auto &a : r.agents) {
        for (std::size_t t = 0; t < a.trials.size(); ++t) {
            const auto &tr = a.trials[t];
            out << a.agent << ',' << t << ',' << tr.game_scores.size() << ','
                << format_double(tr.final_score) << ',' << tr.degenerate << '\n';
        }
        out << a.agent << ",mean,," << format_double(a.final_mean()) << ",\n";
        out << a.agent << ",se,," << format_double(a.final_se()) << ",\n";
    }
    out << "advantage_in_se,,," << format_double(r.advantage_in_se()) << ",\n";
}

} // namespace cnc::harness
