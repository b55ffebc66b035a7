#include "cnc/harness/experiments.hpp"

#include "cnc/envs/blackjack.hpp"
#include "cnc/error.hpp"
#include "cnc/harness/mc.hpp"
#include "cnc/harness/stats.hpp"
#include "cnc/harness/trials.hpp"
#include "cnc/oracle/q.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace cnc::harness {

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

BlackjackEvalResult run_blackjack_eval(const ExperimentConfig &cfg) {
    const envs::Blackjack env;
    const auto policy = envs::blackjack_target_policy();
    const auto truth = oracle::blackjack_exact_q(policy);
    const std::size_t m = cfg.horizon.value_or(env.max_episode_length());
    if (m < env.max_episode_length()) {
        throw ConfigError("horizon " + std::to_string(m) + " is below the longest Blackjack episode (" +
                          std::to_string(env.max_episode_length()) + ")");
    }

    std::vector<std::pair<envs::StateIndex, envs::Action>> pairs;
    for (envs::StateIndex s = 0; s < env.num_states(); ++s) {
        for (envs::Action a = 0; a < env.num_actions(); ++a) {
            if (policy.prob(s, a) > 0.0) {
                pairs.emplace_back(s, a);
            }
        }
    }
    BlackjackEvalResult res;
    res.pairs = pairs.size();
    res.checkpoints = cfg.checkpoints.empty() ? geometric_checkpoints(cfg.episodes) : cfg.checkpoints;
    std::sort(res.checkpoints.begin(), res.checkpoints.end());
    res.checkpoints.erase(std::unique(res.checkpoints.begin(), res.checkpoints.end()),
                          res.checkpoints.end());
    if (!res.checkpoints.empty() && res.checkpoints.back() > cfg.episodes) {
        throw ConfigError("checkpoint beyond the episode budget");
    }

    res.trials = run_trials<std::vector<ErrorPoint>>(cfg.trials, [&](std::size_t trial) {
        const std::uint64_t seed = derive_seed(cfg.seed, "trial", trial);
        Rng env_rng(derive_seed(seed, "env"));
        Rng policy_rng(derive_seed(seed, "policy"));
        EngineOptions opts;
        opts.horizon = m;
        opts.state_model = cfg.state_model;
        opts.return_model = cfg.return_model;
        opts.seed = derive_seed(seed, "model");
        Engine engine(env, opts);
        McBaseline mc(env.num_states(), env.num_actions());

        std::vector<ErrorPoint> curve;
        auto measure = [&] {
            ErrorPoint p;
            for (const auto &[s, a] : pairs) {
                const double q = truth.at(s, a);
                const double ce = engine.q_value(s, a).value - q;
                const double me = mc.estimate(s, a).value_or(0.0) - q;
                p.cnc_mse += ce * ce;
                p.mc_mse += me * me;
                p.cnc_maxse = std::max(p.cnc_maxse, ce * ce);
                p.mc_maxse = std::max(p.mc_maxse, me * me);
            }
            p.cnc_mse /= static_cast<double>(pairs.size());
            p.mc_mse /= static_cast<double>(pairs.size());
            curve.push_back(p);
        };

        std::vector<McBaseline::Step> episode;
        std::size_t next_cp = 0;
        for (std::uint64_t e = 0;; ++e) {
            while (next_cp < res.checkpoints.size() && res.checkpoints[next_cp] == e) {
                measure();
                ++next_cp;
            }
            if (e == cfg.episodes) {
                break;
            }
            envs::StateIndex s = env.initial_state(env_rng);
            engine.begin_episode(s);
            episode.clear();
            while (true) {
                const envs::Action a = policy.sample(s, policy_rng);
                const auto r = env.step(s, a, env_rng);
                episode.push_back({s, a, r.reward});
                engine.observe(a, r.next, r.reward, r.terminal);
                if (r.terminal) {
                    break;
                }
                s = r.next;
            }
            mc.update(episode);
        }
        return curve;
    });
    return res;
}

namespace {

template <class Get>
void column_stats(const BlackjackEvalResult &r, std::size_t k, Get get, double &mu, double &se,
                  double &med) {
    std::vector<double> xs;
    for (const auto &t : r.trials) {
        xs.push_back(get(t[k]));
    }
    mu = mean(xs);
    se = standard_error(xs);
    med = median(xs);
}

} // namespace

void write_blackjack_curve(std::ostream &out, const BlackjackEvalResult &r) {
    out << "episode,cnc_mse,cnc_maxse,mc_mse,mc_maxse,cnc_mse_se,cnc_maxse_se,mc_mse_se,mc_maxse_se,"
           "cnc_mse_median,cnc_maxse_median,mc_mse_median,mc_maxse_median\n";
    for (std::size_t k = 0; k < r.checkpoints.size(); ++k) {
        double mu[4], se[4], med[4];
        column_stats(r, k, [](const ErrorPoint &p) { return p.cnc_mse; }, mu[0], se[0], med[0]);
        column_stats(r, k, [](const ErrorPoint &p) { return p.cnc_maxse; }, mu[1], se[1], med[1]);
        column_stats(r, k, [](const ErrorPoint &p) { return p.mc_mse; }, mu[2], se[2], med[2]);
        column_stats(r, k, [](const ErrorPoint &p) { return p.mc_maxse; }, mu[3], se[3], med[3]);
        out << r.checkpoints[k];
        for (const double *col : {mu, se, med}) {
            for (int i = 0; i < 4; ++i) {
                out << ',' << format_double(col[i]);
            }
        }
        out << '\n';
    }
}

void write_blackjack_trials(std::ostream &out, const BlackjackEvalResult &r) {
    out << "trial,episode,cnc_mse,cnc_maxse,mc_mse,mc_maxse\n";
    for (std::size_t t = 0; t < r.trials.size(); ++t) {
        for (std::size_t k = 0; k < r.checkpoints.size(); ++k) {
            const auto &p = r.trials[t][k];
            out << t << ',' << r.checkpoints[k] << ',' << format_double(p.cnc_mse) << ','
                << format_double(p.cnc_maxse) << ',' << format_double(p.mc_mse) << ','
                << format_double(p.mc_maxse) << '\n';
        }
    }
}

} // namespace cnc::harness
