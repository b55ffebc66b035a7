#include "cnc/envs/trajectory.hpp"

#include "cnc/error.hpp"

#include <cstdio>
#include <ostream>

namespace cnc::envs {

void run_policy(const Environment &env, const Policy &policy, std::uint64_t steps,
                std::uint64_t seed, const TrajectoryObserver &observer) {
    if (steps == 0) {
        throw InputError("run_policy needs at least one step");
    }
    if (policy.num_actions() != env.num_actions()) {
        throw InputError("policy and environment disagree on the action count");
    }
    Rng env_rng(derive_seed(seed, "env"));
    Rng policy_rng(derive_seed(seed, "policy"));

    std::uint64_t episode = 0;
    StateIndex s = env.initial_state(env_rng);
    if (observer.on_start) {
        observer.on_start(episode, s);
    }
    for (std::uint64_t t = 1; t <= steps; ++t) {
        const Action a = policy.sample(s, policy_rng);
        const StepResult r = env.step(s, a, env_rng);
        TrajectoryStep st{t, episode, a, r.terminal ? s : r.next, r.reward, r.terminal};
        if (observer.on_step) {
            observer.on_step(st);
        }
        if (r.terminal) {
            ++episode;
            s = env.initial_state(env_rng);
            if (observer.on_start && t < steps) {
                observer.on_start(episode, s);
            }
        } else {
            s = r.next;
        }
    }
}

Trajectory run_policy(const Environment &env, const Policy &policy, std::uint64_t steps,
                      std::uint64_t seed) {
    Trajectory out;
    out.steps.reserve(steps);
    run_policy(env, policy, steps, seed,
               {[&](std::uint64_t, StateIndex s) { out.starts.push_back(s); },
                [&](const TrajectoryStep &st) { out.steps.push_back(st); }});
    return out;
}

void write_trajectory_csv(std::ostream &out, const Trajectory &t) {
    out << "step,episode,action,state,reward\n";
    char buf[32];
    for (const auto &st : t.steps) {
        std::snprintf(buf, sizeof buf, "%.17g", st.reward);
        out << st.step << ',' << st.episode << ',' << st.action << ',' << st.state << ',' << buf
            << '\n';
    }
}

} // namespace cnc::envs
