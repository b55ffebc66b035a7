#include "cnc/envs/environment.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cnc::envs {

namespace {

constexpr double kRewardTol = 1e-9;
constexpr double kPolicyTol = 1e-12;

std::vector<double> dedupe_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v) {
        if (out.empty() || std::abs(x - out.back()) > kRewardTol) {
            out.push_back(x);
        }
    }
    return out;
}

} // namespace

void Environment::factors(StateIndex, std::span<std::uint8_t> out) const {
    if (!out.empty()) {
        throw InputError(std::string(name()) + " has no factored view");
    }
}

std::vector<double> Environment::return_values(std::size_t m) const {
    return achievable_returns(rewards(), m, episodic());
}

bool Environment::is_reward(double r) const {
    const auto &rs = rewards();
    return std::any_of(rs.begin(), rs.end(), [&](double x) { return std::abs(x - r) <= kRewardTol; });
}

std::vector<double> achievable_returns(std::span<const double> rewards, std::size_t m,
                                       bool allow_shorter) {
    if (rewards.empty()) {
        throw InputError("reward set is empty");
    }
    std::vector<double> layer{0.0};
    std::vector<double> all;
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<double> next;
        next.reserve(layer.size() * rewards.size());
        for (double base : layer) {
            for (double r : rewards) {
                next.push_back(base + r);
            }
        }
        layer = dedupe_sorted(std::move(next));
        if (allow_shorter) {
            all.insert(all.end(), layer.begin(), layer.end());
        }
    }
    return allow_shorter ? dedupe_sorted(std::move(all)) : layer;
}

Policy::Policy(std::size_t num_actions) : num_actions_(num_actions) {
    if (num_actions == 0) {
        throw InputError("policy needs at least one action");
    }
}

Policy::Policy(std::size_t num_states, std::size_t num_actions, std::vector<double> table)
    : num_states_(num_states), num_actions_(num_actions), table_(std::move(table)) {
    if (num_actions == 0 || table_.size() != num_states * num_actions) {
        throw InputError("policy table has wrong size");
    }
    for (std::size_t s = 0; s < num_states; ++s) {
        double sum = 0.0;
        for (std::size_t a = 0; a < num_actions; ++a) {
            const double p = table_[s * num_actions + a];
            if (p < 0.0 || p > 1.0) {
                throw InputError("policy probability outside [0,1] in state " + std::to_string(s));
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kPolicyTol) {
            throw InputError("policy row " + std::to_string(s) + " does not sum to 1");
        }
    }
}

Policy Policy::deterministic(std::size_t num_actions, std::span<const Action> choice) {
    std::vector<double> table(choice.size() * num_actions, 0.0);
    for (std::size_t s = 0; s < choice.size(); ++s) {
        if (choice[s] >= num_actions) {
            throw InputError("deterministic policy picks an unknown action");
        }
        table[s * num_actions + choice[s]] = 1.0;
    }
    return Policy(choice.size(), num_actions, std::move(table));
}

double Policy::prob(StateIndex s, Action a) const {
    if (a >= num_actions_) {
        throw InputError("action outside policy's action set");
    }
    if (table_.empty()) {
        return 1.0 / static_cast<double>(num_actions_);
    }
    if (s >= num_states_) {
        throw InputError("state outside policy table");
    }
    return table_[s * num_actions_ + a];
}

Action Policy::sample(StateIndex s, Rng &rng) const {
    if (table_.empty()) {
        return static_cast<Action>(uniform_index(rng, num_actions_));
    }
    if (s >= num_states_) {
        throw InputError("state outside policy table");
    }
    const double u = uniform01(rng);
    double acc = 0.0;
    Action last_positive = 0;
    for (Action a = 0; a < num_actions_; ++a) {
        const double p = table_[s * num_actions_ + a];
        if (p <= 0.0) {
            continue;
        }
        acc += p;
        last_positive = a;
        if (u < acc) {
            return a;
        }
    }
    return last_positive;
}

} // namespace cnc::envs
