#pragma once

#include "cnc/envs/environment.hpp"

#include <functional>
#include <iosfwd>

namespace cnc::envs {

// One agent step: A_t, then (S_t, R_t). `episode_end` marks the last step
// of an episode; the next step belongs to a fresh episode.
struct TrajectoryStep {
    std::uint64_t step = 0;
    std::uint64_t episode = 0;
    Action action = 0;
    StateIndex state = 0;
    double reward = 0.0;
    bool episode_end = false;
};

struct TrajectoryObserver {
    std::function<void(std::uint64_t episode, StateIndex start)> on_start;
    std::function<void(const TrajectoryStep &)> on_step;
};

// Runs `policy` for `steps` agent steps. Environment randomness comes from
// the "env" stream of `seed`, action sampling from the "policy" stream.
void run_policy(const Environment &env, const Policy &policy, std::uint64_t steps,
                std::uint64_t seed, const TrajectoryObserver &observer);

struct Trajectory {
    std::vector<StateIndex> starts; // start state per episode
    std::vector<TrajectoryStep> steps;
};

Trajectory run_policy(const Environment &env, const Policy &policy, std::uint64_t steps,
                      std::uint64_t seed);

// CSV with header step,episode,action,state,reward.
void write_trajectory_csv(std::ostream &out, const Trajectory &t);

} // namespace cnc::envs
