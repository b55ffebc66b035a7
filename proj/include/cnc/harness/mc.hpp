#pragma once

#include "cnc/envs/environment.hpp"

#include <optional>

namespace cnc::harness {

// First-visit Monte Carlo action values: per (s, a), the sum of returns
// following the first occurrence in each episode and the visit count.
class McBaseline {
public:
    struct Step {
        envs::StateIndex state; // state the action was taken in
        envs::Action action;
        double reward;
    };

    McBaseline(std::size_t num_states, std::size_t num_actions);

    void update(std::span<const Step> episode);

    // nullopt until the first visit.
    std::optional<double> estimate(envs::StateIndex s, envs::Action a) const;
    std::uint64_t visits(envs::StateIndex s, envs::Action a) const { return count_[s * actions_ + a]; }

private:
    std::size_t actions_;
    std::vector<double> sum_;
    std::vector<std::uint64_t> count_;
    std::vector<std::uint64_t> stamp_; // episode id of the last credited visit
    std::uint64_t episode_ = 0;
};

} // namespace cnc::harness
