#include "cnc/harness/mc.hpp"

#include "cnc/error.hpp"

namespace cnc::harness {

McBaseline::McBaseline(std::size_t num_states, std::size_t num_actions)
    : actions_(num_actions), sum_(num_states * num_actions, 0.0),
      count_(num_states * num_actions, 0), stamp_(num_states * num_actions, 0) {}

void McBaseline::update(std::span<const Step> episode) {
    ++episode_;
    std::vector<double> tail(episode.size() + 1, 0.0);
    for (std::size_t i = episode.size(); i-- > 0;) {
        tail[i] = tail[i + 1] + episode[i].reward;
    }
    for (std::size_t i = 0; i < episode.size(); ++i) {
        const std::size_t k = episode[i].state * actions_ + episode[i].action;
        if (k >= sum_.size()) {
            throw InputError("Monte Carlo update outside the state-action table");
        }
        if (stamp_[k] == episode_) {
            continue;
        }
        stamp_[k] = episode_;
        sum_[k] += tail[i];
        ++count_[k];
    }
}

std::optional<double> McBaseline::estimate(envs::StateIndex s, envs::Action a) const {
    const std::size_t k = s * actions_ + a;
    if (count_.at(k) == 0) {
        return std::nullopt;
    }
    return sum_[k] / static_cast<double>(count_[k]);
}

} // namespace cnc::harness
