#include "cnc/engine/engine.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cnc {

double EpsilonSchedule::at(std::uint64_t t) const {
    if (decay_steps == 0 || t >= decay_steps) {
        return end;
    }
    const double frac = static_cast<double>(t) / static_cast<double>(decay_steps);
    return std::max(end, start - (start - end) * frac);
}

Engine::Engine(const envs::Environment &env, EngineOptions opts)
    : env_(env), opts_(std::move(opts)), num_actions_(env.num_actions()),
      returns_(ReturnAlphabet::for_environment(env, opts_.horizon)),
      space_{env.num_states(), env.factor_layout()},
      window_(opts_.horizon, env.rewards()), rng_(opts_.seed) {
    if (env.episodic() && env.max_episode_length() > opts_.horizon) {
        throw ConfigError("horizon " + std::to_string(opts_.horizon) +
                          " is shorter than the longest episode (" +
                          std::to_string(env.max_episode_length()) + ")");
    }
    coding::validate_spec(opts_.state_model, true);
    coding::validate_spec(opts_.return_model, false);
    prior_ = coding::make_state_model(opts_.state_model, space_);
    state_models_.resize(returns_.size() * num_actions_);
    bucket_counts_.assign(state_models_.size(), 0);
    for (std::size_t a = 0; a < num_actions_; ++a) {
        return_models_.push_back(coding::make_sequence_model(opts_.return_model, returns_.size()));
    }
}

Engine::~Engine() = default;

coding::Observation Engine::observe_state(envs::StateIndex s,
                                          std::vector<std::uint8_t> &buf) const {
    buf.resize(space_.layout.size());
    if (!buf.empty()) {
        env_.factors(s, buf);
    }
    return {s, buf};
}

void Engine::begin_episode(envs::StateIndex s0) {
    if (s0 >= env_.num_states()) {
        throw InputError("start state out of range");
    }
    if (has_state_ && !window_.empty()) {
        end_episode();
    }
    current_ = s0;
    has_state_ = true;
}

void Engine::observe(envs::Action a, envs::StateIndex s, double r, bool terminal) {
    if (!has_state_) {
        throw InputError("observe() before begin_episode()");
    }
    if (a >= num_actions_) {
        throw InputError("action out of range");
    }
    const auto &rs = window_.rewards();
    std::size_t ri = rs.size();
    for (std::size_t k = 0; k < rs.size(); ++k) {
        if (std::abs(rs[k] - r) <= 1e-9) {
            ri = k;
            break;
        }
    }
    if (ri == rs.size()) {
        throw InputError("reward " + std::to_string(r) + " is not in the declared set");
    }
    window_.push({current_, a, ri});
    if (window_.full()) {
        const double z = window_.sum();
        consume(window_.pop(), z);
    }
    if (terminal) {
        end_episode();
        return;
    }
    if (s >= env_.num_states()) {
        throw InputError("state out of range");
    }
    current_ = s;
}

void Engine::end_episode() {
    while (!window_.empty()) {
        const double z = window_.sum();
        consume(window_.pop(), z);
    }
    has_state_ = false;
}

void Engine::consume(const LaggedWindow::Entry &e, double z) {
    const auto zi = returns_.index_of(z);
    if (!zi) {
        throw InputError("return " + std::to_string(z) + " is outside the declared alphabet");
    }
    const std::size_t b = bucket(*zi, e.action);
    auto &model = state_models_[b];
    if (!model) {
        model = prior_->clone();
    }
    std::vector<std::uint8_t> buf;
    model->update(observe_state(e.prev_state, buf));
    return_models_[e.action]->update(*zi);
    ++bucket_counts_[b];
    ++updates_;
    if (hook_) {
        hook_(*zi, e.action, e.prev_state);
    }
}

std::uint64_t Engine::bucket_updates(std::size_t z, envs::Action a) const {
    return bucket_counts_.at(bucket(z, a));
}

void Engine::fill_log_weights(const coding::Observation &obs, envs::Action a,
                              std::vector<double> &lw) const {
    const std::size_t nz = returns_.size();
    lw.resize(nz);
    double prior_lp = std::numeric_limits<double>::quiet_NaN();
    const auto &rz = *return_models_[a];
    for (std::size_t z = 0; z < nz; ++z) {
        const auto &m = state_models_[bucket(z, a)];
        double ls;
        if (m) {
            ls = m->log2_prob(obs);
        } else {
            if (std::isnan(prior_lp)) {
                prior_lp = prior_->log2_prob(obs);
            }
            ls = prior_lp;
        }
        lw[z] = ls + rz.log2_prob(z);
    }
}

namespace {

// Normalizes log2 weights in place; false if every weight is zero.
bool normalize_log2(std::vector<double> &w) {
    const double mx = *std::max_element(w.begin(), w.end());
    if (!std::isfinite(mx)) {
        return false;
    }
    double sum = 0.0;
    for (double &x : w) {
        x = std::exp2(x - mx);
        sum += x;
    }
    for (double &x : w) {
        x /= sum;
    }
    return true;
}

} // namespace

std::vector<double> Engine::return_posterior(envs::StateIndex s, envs::Action a) const {
    if (a >= num_actions_) {
        throw InputError("action out of range");
    }
    if (s >= env_.num_states()) {
        throw InputError("state out of range");
    }
    std::vector<std::uint8_t> buf;
    const auto obs = observe_state(s, buf);
    std::vector<double> w;
    fill_log_weights(obs, a, w);
    if (normalize_log2(w)) {
        return w;
    }
    degenerate_.fetch_add(1, std::memory_order_relaxed);
    const auto &rz = *return_models_[a];
    for (std::size_t z = 0; z < w.size(); ++z) {
        w[z] = rz.log2_prob(z);
    }
    if (!normalize_log2(w)) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    }
    return w;
}

QEstimate Engine::q_value(envs::StateIndex s, envs::Action a) const {
    QEstimate q;
    q.posterior = return_posterior(s, a);
    for (std::size_t z = 0; z < q.posterior.size(); ++z) {
        q.value += returns_.value(z) * q.posterior[z];
    }
    return q;
}

envs::Action Engine::greedy_action(envs::StateIndex s) {
    std::vector<double> q(num_actions_);
    for (std::size_t a = 0; a < num_actions_; ++a) {
        q[a] = q_value(s, a).value;
    }
    const double best = *std::max_element(q.begin(), q.end());
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    std::vector<envs::Action> ties;
    for (std::size_t a = 0; a < num_actions_; ++a) {
        if (q[a] >= best - tol) {
            ties.push_back(a);
        }
    }
    if (ties.size() == 1) {
        return ties[0];
    }
    return ties[uniform_index(rng_, ties.size())];
}

envs::Action Engine::epsilon_greedy_action(envs::StateIndex s, std::uint64_t t) {
    if (uniform01(rng_) < opts_.epsilon.at(t)) {
        return static_cast<envs::Action>(uniform_index(rng_, num_actions_));
    }
    return greedy_action(s);
}

std::string Engine::snapshot() const {
    coding::BinaryWriter w;
    const auto h = w.begin_record("engine", 1);
    w.u64(opts_.horizon);
    w.u64(num_actions_);
    w.u64(returns_.size());
    w.u8(has_state_ ? 1 : 0);
    w.u64(current_);
    w.u64(updates_);
    w.u64(degenerate_.load());
    std::ostringstream rng_state;
    rng_state << rng_;
    w.str(rng_state.str());
    w.u64(window_.size());
    for (std::size_t i = 0; i < window_.size(); ++i) {
        const auto &e = window_.at(i);
        w.u64(e.prev_state);
        w.u64(e.action);
        w.u64(e.reward);
    }
    for (std::size_t b = 0; b < state_models_.size(); ++b) {
        w.u64(bucket_counts_[b]);
        w.u8(state_models_[b] ? 1 : 0);
        if (state_models_[b]) {
            state_models_[b]->save(w);
        }
    }
    for (const auto &m : return_models_) {
        m->save(w);
    }
    w.end_record(h);
    return coding::wrap_snapshot(w.take());
}

void Engine::restore(std::string_view bytes) {
    auto outer = coding::open_snapshot(bytes);
    auto r = outer.record("engine");
    if (r.u64() != opts_.horizon || r.u64() != num_actions_ || r.u64() != returns_.size()) {
        throw FormatError("engine snapshot does not match this engine's configuration");
    }
    has_state_ = r.u8() != 0;
    current_ = r.u64();
    updates_ = r.u64();
    degenerate_.store(r.u64());
    std::istringstream rng_state(r.str());
    rng_state >> rng_;
    if (!rng_state) {
        throw FormatError("bad RNG state in engine snapshot");
    }
    window_.clear();
    const auto n = r.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
        LaggedWindow::Entry e;
        e.prev_state = r.u64();
        e.action = r.u64();
        e.reward = r.u64();
        window_.push(e);
    }
    for (std::size_t b = 0; b < state_models_.size(); ++b) {
        bucket_counts_[b] = r.u64();
        state_models_[b] = r.u8() ? coding::load_state_model(r) : nullptr;
    }
    for (auto &m : return_models_) {
        m = coding::load_sequential_model(r);
    }
    r.expect_done();
    outer.expect_done();
}

} // namespace cnc
