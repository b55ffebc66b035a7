#pragma once

#include "cnc/coding/model.hpp"
#include "cnc/rng.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace cnc::envs {

using StateIndex = std::uint64_t;
using Action = std::size_t;

struct StepResult {
    StateIndex next = 0; // meaningless when terminal
    double reward = 0.0;
    bool terminal = false;
};

// A finite MDP (S, A, mu) with a finite declared reward set. step() is a
// pure function of (state, action, rng stream), so one instance may be
// shared by independent runs.
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::string_view name() const = 0;
    virtual std::uint64_t num_states() const = 0;
    virtual std::size_t num_actions() const = 0;
    virtual const std::vector<double> &rewards() const = 0;

    // Episodic environments restart after a terminal step and their returns
    // are truncated at the episode boundary.
    virtual bool episodic() const = 0;
    // Upper bound on agent steps per episode (0: continuing).
    virtual std::size_t max_episode_length() const { return 0; }

    virtual coding::FactorLayout factor_layout() const { return {}; }
    virtual void factors(StateIndex s, std::span<std::uint8_t> out) const;

    virtual StateIndex initial_state(Rng &rng) const = 0;
    virtual StepResult step(StateIndex s, Action a, Rng &rng) const = 0;

    // Every return an m-step window can produce, ascending.
    virtual std::vector<double> return_values(std::size_t m) const;

    bool is_reward(double r) const;
};

// Distinct sums of exactly m rewards (or of 1..m rewards when
// `allow_shorter`, as for truncated episodic returns), ascending.
std::vector<double> achievable_returns(std::span<const double> rewards, std::size_t m,
                                       bool allow_shorter);

// Stationary policy pi(a|s): a probability table, or uniform when built
// without one.
class Policy {
public:
    // Uniform over actions in every state.
    explicit Policy(std::size_t num_actions);
    Policy(std::size_t num_states, std::size_t num_actions, std::vector<double> table);

    static Policy deterministic(std::size_t num_actions, std::span<const Action> choice);

    std::size_t num_actions() const { return num_actions_; }
    bool tabular() const { return !table_.empty(); }
    std::size_t num_states() const { return num_states_; }

    double prob(StateIndex s, Action a) const;
    Action sample(StateIndex s, Rng &rng) const;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_;
    std::vector<double> table_; // s * num_actions + a
};

} // namespace cnc::envs
