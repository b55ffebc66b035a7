#pragma once

#include "cnc/coding/factory.hpp"
#include "cnc/engine/window.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <string>

namespace cnc {

// Linear decay from `start` to `end` over `decay_steps`, then constant.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.02;
    std::uint64_t decay_steps = 200000;

    double at(std::uint64_t t) const;
};

struct EngineOptions {
    std::size_t horizon = 1; // m
    coding::ModelSpec state_model{"dirichlet", {}};
    coding::ModelSpec return_model{"dirichlet", {}};
    EpsilonSchedule epsilon;
    std::uint64_t seed = 0; // tie-breaking and exploration
};

struct QEstimate {
    double value = 0.0;
    std::vector<double> posterior; // over the return alphabet
};

// Online value estimation by compress-and-control: one state model per
// (return, action) bucket and one return model per action, fed with
// m-lagged returns; values come from Bayes' rule over returns.
//
// Feed it with begin_episode(s0) and then observe(a, s, r, terminal) for
// every agent step. For episodic environments the m-lagged return of each
// step is cut at the episode end.
class Engine {
public:
    Engine(const envs::Environment &env, EngineOptions opts);
    ~Engine();
    Engine(const Engine &) = delete;
    Engine &operator=(const Engine &) = delete;

    const ReturnAlphabet &returns() const { return returns_; }
    std::size_t horizon() const { return opts_.horizon; }
    std::size_t num_actions() const { return num_actions_; }

    void begin_episode(envs::StateIndex s0);
    void observe(envs::Action a, envs::StateIndex s, double r, bool terminal = false);
    // Consumes whatever is left in the window with truncated returns.
    void end_episode();

    std::vector<double> return_posterior(envs::StateIndex s, envs::Action a) const;
    QEstimate q_value(envs::StateIndex s, envs::Action a) const;
    envs::Action greedy_action(envs::StateIndex s);
    envs::Action epsilon_greedy_action(envs::StateIndex s, std::uint64_t t);

    std::uint64_t updates() const { return updates_; }
    std::uint64_t bucket_updates(std::size_t z, envs::Action a) const;
    std::uint64_t degenerate_posteriors() const { return degenerate_.load(); }

    // Called for every bucket update with (return index, action, state).
    using UpdateHook = std::function<void(std::size_t, envs::Action, envs::StateIndex)>;
    void set_update_hook(UpdateHook hook) { hook_ = std::move(hook); }

    // Models, window, counters and RNG state. restore() requires an engine
    // built with the same environment and options.
    std::string snapshot() const;
    void restore(std::string_view bytes);

private:
    std::size_t bucket(std::size_t z, envs::Action a) const { return z * num_actions_ + a; }
    coding::Observation observe_state(envs::StateIndex s, std::vector<std::uint8_t> &buf) const;
    void consume(const LaggedWindow::Entry &e, double z);
    void fill_log_weights(const coding::Observation &obs, envs::Action a,
                          std::vector<double> &lw) const;

    const envs::Environment &env_;
    EngineOptions opts_;
    std::size_t num_actions_;
    ReturnAlphabet returns_;
    coding::StateSpace space_;
    LaggedWindow window_;

    // Buckets that have never been updated share one prior-state model.
    std::unique_ptr<coding::StateModel> prior_;
    std::vector<std::unique_ptr<coding::StateModel>> state_models_;
    std::vector<std::uint64_t> bucket_counts_;
    std::vector<std::unique_ptr<coding::SequentialModel>> return_models_;

    bool has_state_ = false;
    envs::StateIndex current_ = 0;
    std::uint64_t updates_ = 0;
    mutable std::atomic<std::uint64_t> degenerate_{0};
    Rng rng_;
    UpdateHook hook_;
};

} // namespace cnc
