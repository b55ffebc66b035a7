#pragma once

#include "cnc/envs/explicit_mdp.hpp"

namespace cnc::oracle {

struct RandomMdpOptions {
    std::size_t min_states = 2;
    std::size_t max_states = 6;
    std::size_t max_actions = 3;
    std::size_t max_rewards = 3;
    std::size_t max_outcomes = 2; // (s', r) pairs per (s, a)
    std::size_t max_support = 2;  // actions with pi(a|s) > 0
};

struct RandomMdp {
    envs::ExplicitMdp mdp;
    envs::Policy policy;
};

// Integer rewards in [-2, 2], sparse kernel, start state 0. No ergodicity
// guarantee.
RandomMdp random_mdp(Rng &rng, const RandomMdpOptions &opts = {});

// Rejection-samples random_mdp until the augmented chain is irreducible,
// aperiodic and visits every state. Throws ResourceError after max_tries.
RandomMdp random_ergodic_mdp(Rng &rng, const RandomMdpOptions &opts = {},
                             std::size_t max_tries = 10000);

} // namespace cnc::oracle
