#pragma once

#include "cnc/envs/environment.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cnc {

// The finite set Z of m-step returns, ascending, with value <-> index lookup.
class ReturnAlphabet {
public:
    explicit ReturnAlphabet(std::vector<double> values);
    static ReturnAlphabet for_environment(const envs::Environment &env, std::size_t m);

    std::size_t size() const { return values_.size(); }
    double value(std::size_t i) const { return values_[i]; }
    const std::vector<double> &values() const { return values_; }
    // Index of z, matching within 1e-9; nullopt if z is not a member.
    std::optional<std::size_t> index_of(double z) const;

private:
    std::vector<double> values_;
};

// Ring buffer of the last m (predecessor state, action, reward) triples.
// Rewards are kept as indices into the declared reward list and the window
// sum is formed from per-reward counts, so it never drifts.
class LaggedWindow {
public:
    struct Entry {
        envs::StateIndex prev_state = 0;
        envs::Action action = 0;
        std::size_t reward = 0; // index into the reward list
    };

    LaggedWindow(std::size_t capacity, std::vector<double> rewards);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return size_; }
    bool full() const { return size_ == capacity_; }
    bool empty() const { return size_ == 0; }

    void push(const Entry &e);
    const Entry &front() const;
    const Entry &at(std::size_t i) const; // 0 = oldest
    Entry pop();
    void clear();

    double sum() const;
    const std::vector<double> &rewards() const { return rewards_; }

private:
    std::size_t capacity_;
    std::vector<double> rewards_;
    std::vector<Entry> ring_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
    std::vector<std::uint64_t> counts_;
};

} // namespace cnc
