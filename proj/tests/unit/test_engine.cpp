#include "cnc/engine/engine.hpp"
#include "cnc/envs/blackjack.hpp"
#include "cnc/envs/trajectory.hpp"
#include "cnc/error.hpp"
#include "cnc/oracle/q.hpp"
#include "cnc/oracle/random_mdp.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace cnc;
using namespace cnc::envs;

namespace {

// Two states, two actions, rewards {0, 1}: the action picks the next state
// and the reward is 1 on entering state 1.
ExplicitMdp toggle_mdp() {
    std::vector<std::vector<Outcome>> k(4);
    k[0] = {{0, 0.0, 1.0}};
    k[1] = {{1, 1.0, 1.0}};
    k[2] = {{0, 0.0, 1.0}};
    k[3] = {{1, 1.0, 1.0}};
    return ExplicitMdp(2, 2, {0.0, 1.0}, std::move(k), {1.0, 0.0});
}

ExplicitMdp single_state_mdp(std::vector<double> rewards) {
    std::vector<std::vector<Outcome>> k(2);
    const double p = 1.0 / static_cast<double>(rewards.size());
    for (auto &row : k) {
        for (double r : rewards) {
            row.push_back({0, r, p});
        }
    }
    return ExplicitMdp(1, 2, rewards, std::move(k), {1.0});
}

struct Update {
    std::size_t z;
    Action a;
    StateIndex s;
};

} // namespace

TEST_CASE("one-step horizon pairs each reward with its predecessor state") {
    const auto mdp = toggle_mdp();
    Engine e(mdp, {1});
    std::vector<Update> seen;
    e.set_update_hook([&](std::size_t z, Action a, StateIndex s) { seen.push_back({z, a, s}); });
    e.begin_episode(0);
    e.observe(1, 1, 1.0);
    e.observe(0, 0, 0.0);
    e.observe(1, 1, 1.0);
    REQUIRE(seen.size() == 3);
    CHECK(seen[0].z == 1);
    CHECK(seen[0].a == 1);
    CHECK(seen[0].s == 0);
    CHECK(seen[1].z == 0);
    CHECK(seen[1].s == 1);
    CHECK(seen[2].s == 0);
}

TEST_CASE("two-step horizon sums rewards over the window") {
    const auto mdp = toggle_mdp();
    Engine e(mdp, {2});
    CHECK(e.returns().values() == std::vector<double>{0, 1, 2});
    std::vector<Update> seen;
    e.set_update_hook([&](std::size_t z, Action a, StateIndex s) { seen.push_back({z, a, s}); });
    e.begin_episode(0);
    // (a, s, r): (1,1,1) (0,0,0) (1,1,1) (1,1,1)
    e.observe(1, 1, 1.0);
    CHECK(seen.empty());
    e.observe(0, 0, 0.0);
    e.observe(1, 1, 1.0);
    e.observe(1, 1, 1.0);
    REQUIRE(seen.size() == 3);
    CHECK(seen[0].z == 1); // 1 + 0, credited to (s0 = 0, a = 1)
    CHECK(seen[0].s == 0);
    CHECK(seen[0].a == 1);
    CHECK(seen[1].z == 1); // 0 + 1
    CHECK(seen[1].s == 1);
    CHECK(seen[1].a == 0);
    CHECK(seen[2].z == 2); // 1 + 1
    CHECK(seen[2].s == 0);
}

TEST_CASE("continuing runs perform t - m + 1 updates") {
    const auto mdp = toggle_mdp();
    for (std::size_t m : {1, 3, 7}) {
        Engine e(mdp, {m});
        std::uint64_t per_bucket = 0;
        e.set_update_hook([&](std::size_t, Action, StateIndex) { ++per_bucket; });
        run_policy(mdp, Policy(2), 500, 5,
                   {[&](std::uint64_t, StateIndex s0) { e.begin_episode(s0); },
                    [&](const TrajectoryStep &t) { e.observe(t.action, t.state, t.reward); }});
        CHECK(e.updates() == 500 - m + 1);
        CHECK(per_bucket == e.updates());
        std::uint64_t total = 0;
        for (std::size_t z = 0; z < e.returns().size(); ++z) {
            for (Action a = 0; a < 2; ++a) {
                total += e.bucket_updates(z, a);
            }
        }
        CHECK(total == e.updates());
    }
}

TEST_CASE("episodic returns are truncated at the terminal step") {
    Blackjack bj;
    Engine e(bj, {bj.max_episode_length()});
    std::vector<std::size_t> zs;
    e.set_update_hook([&](std::size_t z, Action, StateIndex) { zs.push_back(z); });
    std::size_t checked = 0;
    run_policy(bj, blackjack_target_policy(), 20000, 3,
               {[&](std::uint64_t, StateIndex s0) { e.begin_episode(s0); },
                [&](const TrajectoryStep &t) {
                    zs.clear();
                    e.observe(t.action, t.state, t.reward, t.episode_end);
                    if (t.episode_end) {
                        // Every step of the episode sees the episode's reward.
                        const auto z = *e.returns().index_of(t.reward);
                        for (auto v : zs) {
                            CHECK(v == z);
                        }
                        ++checked;
                    } else {
                        CHECK(zs.empty());
                    }
                }});
    CHECK(checked > 1000);
    CHECK_THROWS_AS(Engine(bj, {5}), ConfigError);
}

TEST_CASE("posteriors are normalized") {
    Rng rng(8);
    const auto r = oracle::random_ergodic_mdp(rng);
    for (const char *kind : {"frequency", "dirichlet", "sad", "ctw", "lz"}) {
        Engine e(r.mdp, {3, {kind, {}}, {kind, {}}});
        run_policy(r.mdp, r.policy, 3000, 9,
                   {[&](std::uint64_t, StateIndex s0) { e.begin_episode(s0); },
                    [&](const TrajectoryStep &t) { e.observe(t.action, t.state, t.reward); }});
        for (StateIndex s = 0; s < r.mdp.num_states(); ++s) {
            for (Action a = 0; a < r.mdp.num_actions(); ++a) {
                const auto p = e.return_posterior(s, a);
                CAPTURE(kind);
                CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
                const auto q = e.q_value(s, a);
                CHECK(q.value >= e.returns().values().front() - 1e-9);
                CHECK(q.value <= e.returns().values().back() + 1e-9);
            }
        }
    }
}

TEST_CASE("a single return value gives a point-mass posterior") {
    const auto mdp = single_state_mdp({0.0});
    Engine e(mdp, {4});
    e.begin_episode(0);
    for (int i = 0; i < 10; ++i) {
        e.observe(i % 2, 0, 0.0);
    }
    const auto q = e.q_value(0, 1);
    CHECK(q.value == 0.0);
    CHECK(q.posterior == std::vector<double>{1.0});
}

TEST_CASE("uninformative states leave the return model's prediction") {
    // With one state every bucket predicts it with probability 1, so the
    // posterior is the Dirichlet return estimate for the action.
    const auto mdp = single_state_mdp({0.0, 1.0});
    Engine e(mdp, {1});
    e.begin_episode(0);
    const std::vector<std::pair<Action, double>> steps{{0, 1}, {0, 1}, {0, 0}, {1, 0}, {0, 1}};
    std::array<std::array<double, 2>, 2> counts{};
    for (auto [a, r] : steps) {
        e.observe(a, 0, r);
        counts[a][static_cast<std::size_t>(r)] += 1;
    }
    for (Action a = 0; a < 2; ++a) {
        const double n = counts[a][0] + counts[a][1];
        const auto p = e.return_posterior(0, a);
        for (std::size_t z = 0; z < 2; ++z) {
            CHECK(p[z] == doctest::Approx((counts[a][z] + 0.5) / (n + 1.0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("epsilon schedule") {
    EpsilonSchedule eps;
    CHECK(eps.at(0) == 1.0);
    CHECK(eps.at(100000) == doctest::Approx(0.51));
    CHECK(eps.at(200000) == doctest::Approx(0.02));
    CHECK(eps.at(5000000) == doctest::Approx(0.02));
}

TEST_CASE("greedy ties are broken uniformly") {
    const auto mdp = single_state_mdp({0.0, 1.0});
    Engine e(mdp, {1, {"dirichlet", {}}, {"dirichlet", {}}, {}, 77});
    e.begin_episode(0);
    std::array<int, 2> picks{};
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        ++picks[e.greedy_action(0)];
    }
    // Binomial(n, 1/2): 4 standard deviations.
    CHECK(std::abs(picks[0] - n / 2) <= 4.0 * std::sqrt(n / 4.0));
}

TEST_CASE("snapshot and restore continue identically") {
    Rng rng(12);
    const auto r = oracle::random_ergodic_mdp(rng);
    EngineOptions opts{3, {"ctw", {}}, {"sad", {}}, {}, 5};
    Engine a(r.mdp, opts);
    const auto traj = run_policy(r.mdp, r.policy, 2000, 4);
    a.begin_episode(traj.starts.front());
    for (std::size_t i = 0; i < 1000; ++i) {
        a.observe(traj.steps[i].action, traj.steps[i].state, traj.steps[i].reward);
    }
    Engine b(r.mdp, opts);
    b.restore(a.snapshot());
    CHECK(b.snapshot() == a.snapshot());
    for (std::size_t i = 1000; i < 2000; ++i) {
        const auto &t = traj.steps[i];
        CHECK(a.epsilon_greedy_action(t.state, i) == b.epsilon_greedy_action(t.state, i));
        a.observe(t.action, t.state, t.reward);
        b.observe(t.action, t.state, t.reward);
    }
    CHECK(a.snapshot() == b.snapshot());
    CHECK(a.q_value(0, 0).value == b.q_value(0, 0).value);

    Engine other(r.mdp, {2});
    CHECK_THROWS_AS(other.restore(a.snapshot()), FormatError);
}

TEST_CASE("frequency posteriors converge to the stationary conditional return law") {
    Rng rng(21);
    const auto r = oracle::random_ergodic_mdp(rng);
    const std::size_t m = 2;
    const auto report = oracle::run_oracle(r.mdp, r.policy, m);
    Engine e(r.mdp, {m, {"frequency", {}}, {"frequency", {}}});
    run_policy(r.mdp, r.policy, 400000, 22,
               {[&](std::uint64_t, StateIndex s0) { e.begin_episode(s0); },
                [&](const TrajectoryStep &t) { e.observe(t.action, t.state, t.reward); }});
    const auto &mg = report.marginals;
    REQUIRE(mg.z_values == e.returns().values());
    for (StateIndex s = 0; s < mg.num_states; ++s) {
        for (Action a = 0; a < mg.num_actions; ++a) {
            if (mg.nu_sa(s, a) < 0.02) {
                continue;
            }
            const auto p = e.return_posterior(s, a);
            for (std::size_t z = 0; z < p.size(); ++z) {
                CHECK(p[z] == doctest::Approx(mg.nu_z_given_sa(z, s, a)).epsilon(0.03).scale(1.0));
            }
        }
    }
}
