#include "cnc/harness/experiments.hpp"

#include "cnc/envs/explicit_mdp.hpp"
#include "cnc/envs/trajectory.hpp"
#include "cnc/error.hpp"
#include "cnc/harness/stats.hpp"
#include "cnc/harness/trials.hpp"
#include "cnc/oracle/q.hpp"

#include <algorithm>
#include <ostream>

namespace cnc::harness {

RateTestResult run_rate_test(const ExperimentConfig &cfg) {
    if (cfg.env.kind != "explicit") {
        throw ConfigError("rate-test needs an explicit MDP");
    }
    const auto file = envs::load_explicit_mdp(cfg.env.mdp_path);
    const auto &mdp = file.mdp;
    const envs::Policy policy = file.policy ? *file.policy : envs::Policy(mdp.num_actions());
    const std::size_t m = cfg.horizon.value_or(2);
    const auto oracle = oracle::run_oracle(mdp, policy, m);

    RateTestResult res;
    res.sample_sizes = cfg.sample_sizes;
    std::sort(res.sample_sizes.begin(), res.sample_sizes.end());
    const auto [rmin, rmax] = std::minmax_element(mdp.rewards().begin(), mdp.rewards().end());
    res.bound = static_cast<double>(m) * (*rmax - *rmin);
    const std::uint64_t total = res.sample_sizes.back();

    res.errors = run_trials<std::vector<double>>(cfg.trials, [&](std::size_t trial) {
        const std::uint64_t seed = derive_seed(cfg.seed, "trial", trial);
        EngineOptions opts;
        opts.horizon = m;
        opts.state_model = cfg.state_model;
        opts.return_model = cfg.return_model;
        opts.seed = derive_seed(seed, "model");
        Engine engine(mdp, opts);
        std::vector<double> errs;
        std::size_t next = 0;
        envs::run_policy(mdp, policy, total, seed,
                         {[&](std::uint64_t, envs::StateIndex s) { engine.begin_episode(s); },
                          [&](const envs::TrajectoryStep &st) {
                              engine.observe(st.action, st.state, st.reward, st.episode_end);
                              while (next < res.sample_sizes.size() && res.sample_sizes[next] == st.step) {
                                  double ss = 0.0;
                                  std::size_t n = 0;
                                  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
                                      for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
                                          if (!oracle.q_nu.is_defined(s, a)) {
                                              continue;
                                          }
                                          const double d = engine.q_value(s, a).value - oracle.q_dp.at(s, a);
                                          ss += d * d;
                                          ++n;
                                      }
                                  }
                                  errs.push_back(std::sqrt(ss / static_cast<double>(n)));
                                  ++next;
                              }
                          }});
        return errs;
    });
    for (std::size_t k = 0; k < res.sample_sizes.size(); ++k) {
        std::vector<double> xs;
        for (const auto &t : res.errors) {
            xs.push_back(t[k]);
        }
        res.median_errors.push_back(median(xs));
    }
    for (std::size_t k = 0; k + 1 < res.median_errors.size(); ++k) {
        res.ratios.push_back(res.median_errors[k] / res.median_errors[k + 1]);
    }
    return res;
}

bool rate_within(const RateTestResult &r, double lo, double hi) {
    return !r.ratios.empty() && std::all_of(r.ratios.begin(), r.ratios.end(),
                                            [&](double x) { return x >= lo && x <= hi; });
}

void write_rate_report(std::ostream &out, const RateTestResult &r) {
    out << "samples,median_error,ratio_to_next,max_error,bound\n";
    for (std::size_t k = 0; k < r.sample_sizes.size(); ++k) {
        double worst = 0.0;
        for (const auto &t : r.errors) {
            worst = std::max(worst, t[k]);
        }
        out << r.sample_sizes[k] << ',' << format_double(r.median_errors[k]) << ','
            << (k < r.ratios.size() ? format_double(r.ratios[k]) : "") << ','
            << format_double(worst) << ',' << format_double(r.bound) << '\n';
    }
}

} // namespace cnc::harness
