#pragma once

#include "cnc/envs/environment.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace cnc::envs {

struct Outcome {
    StateIndex next = 0;
    double reward = 0.0;
    double prob = 0.0;

    bool operator==(const Outcome &) const = default;
};

// Continuing tabular MDP with the kernel mu(s', r | s, a) held explicitly.
class ExplicitMdp final : public Environment {
public:
    ExplicitMdp(std::size_t num_states, std::size_t num_actions, std::vector<double> rewards,
                std::vector<std::vector<Outcome>> kernel, std::vector<double> start);

    std::string_view name() const override { return "explicit"; }
    std::uint64_t num_states() const override { return num_states_; }
    std::size_t num_actions() const override { return num_actions_; }
    const std::vector<double> &rewards() const override { return rewards_; }
    bool episodic() const override { return false; }

    StateIndex initial_state(Rng &rng) const override;
    StepResult step(StateIndex s, Action a, Rng &rng) const override;

    const std::vector<Outcome> &outcomes(StateIndex s, Action a) const;
    const std::vector<double> &start() const { return start_; }
    // Index of `r` in the reward list; throws if undeclared.
    std::size_t reward_index(double r) const;

private:
    std::size_t num_states_;
    std::size_t num_actions_;
    std::vector<double> rewards_;
    std::vector<std::vector<Outcome>> kernel_; // s * num_actions + a
    std::vector<double> start_;
};

struct MdpFile {
    ExplicitMdp mdp;
    std::optional<Policy> policy;
};

// Text format, one directive per line, '#' starts a comment:
//   states N
//   actions N
//   rewards r1 r2 ...
//   start s            (optional, default 0; may repeat as "start s p")
//   policy s a p       (optional; rows must sum to 1)
//   s a s' r p         (transition)
MdpFile parse_explicit_mdp(std::istream &in);
MdpFile load_explicit_mdp(const std::string &path);
void write_explicit_mdp(std::ostream &out, const ExplicitMdp &mdp,
                        const Policy *policy = nullptr);

} // namespace cnc::envs
