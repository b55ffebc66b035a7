#include "cnc/envs/blackjack.hpp"
#include "cnc/envs/explicit_mdp.hpp"
#include "cnc/envs/minipong.hpp"
#include "cnc/envs/trajectory.hpp"
#include "cnc/error.hpp"
#include "cnc/oracle/q.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

using namespace cnc;
using namespace cnc::envs;

namespace {

// Hand tracked as hard total plus an ace flag, independent of Blackjack::hit.
struct Hand {
    int hard = 0;
    bool ace = false;
    int total() const { return ace && hard + 10 <= 21 ? hard + 10 : hard; }
};

// Most agent hits possible from `h` without busting.
int max_hits(Hand h) {
    int best = 0;
    for (int c = 1; c <= 10; ++c) {
        Hand n{h.hard + c, h.ace || c == 1};
        if (n.total() <= 21) {
            best = std::max(best, 1 + max_hits(n));
        }
    }
    return best;
}

} // namespace

TEST_CASE("blackjack state space and reward set") {
    Blackjack bj;
    CHECK(bj.num_states() == 200);
    CHECK(bj.num_actions() == 2);
    CHECK(bj.rewards() == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(bj.return_values(bj.max_episode_length()) == std::vector<double>{-1.0, 0.0, 1.0});
    std::set<StateIndex> seen;
    for (int d = 1; d <= 10; ++d) {
        for (int p = 12; p <= 21; ++p) {
            for (bool ace : {false, true}) {
                const auto s = Blackjack::encode({d, p, ace});
                CHECK(Blackjack::decode(s) == BlackjackState{d, p, ace});
                seen.insert(s);
            }
        }
    }
    CHECK(seen.size() == 200);
    CHECK_THROWS_AS(Blackjack::decode(200), InputError);
}

TEST_CASE("blackjack target policy stays only on 20 and 21") {
    const auto pi = blackjack_target_policy();
    CHECK(pi.prob(Blackjack::encode({1, 20, false}), Blackjack::kStay) == 1.0);
    CHECK(pi.prob(Blackjack::encode({10, 21, true}), Blackjack::kStay) == 1.0);
    CHECK(pi.prob(Blackjack::encode({5, 19, false}), Blackjack::kHit) == 1.0);
    CHECK(pi.prob(Blackjack::encode({7, 12, true}), Blackjack::kHit) == 1.0);
}

TEST_CASE("blackjack episode length bound matches exhaustive enumeration") {
    int longest = 0;
    for (int hard = 2; hard <= 21; ++hard) {
        for (bool ace : {false, true}) {
            Hand h{hard, ace};
            if (ace && hard > 11) {
                continue; // the usable-ace flag only matters up to hard 11
            }
            if (h.total() < 12 || h.total() > 21) {
                continue;
            }
            longest = std::max(longest, max_hits(h) + 1);
        }
    }
    CHECK(Blackjack().max_episode_length() == static_cast<std::size_t>(longest));
    CHECK(longest == 20); // soft 12 then nineteen aces
}

TEST_CASE("blackjack hit rule") {
    int sum = 21;
    bool ace = true;
    CHECK(Blackjack::hit(sum, ace, 1));
    CHECK(sum == 12);
    CHECK_FALSE(ace);
    sum = 15;
    ace = false;
    CHECK_FALSE(Blackjack::hit(sum, ace, 10));
    sum = 12;
    ace = true;
    CHECK(Blackjack::hit(sum, ace, 5));
    CHECK(sum == 17);
    CHECK(ace);
}

TEST_CASE("blackjack dealer and start distributions are normalized") {
    for (int d = 1; d <= 10; ++d) {
        const auto o = Blackjack::dealer_outcome(d);
        double total = 0.0;
        for (double p : o) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto start = Blackjack::start_distribution();
    REQUIRE(start.size() == 200);
    double total = 0.0;
    for (double p : start) {
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("blackjack simulated episode returns agree with the exact law") {
    Blackjack bj;
    const auto pi = blackjack_target_policy();
    const auto law = oracle::blackjack_episode_return_law(pi);
    std::array<std::uint64_t, 3> counts{};
    std::uint64_t episodes = 0;
    double running = 0.0;
    std::uint64_t longest = 0, length = 0;
    run_policy(bj, pi, 400000, 7,
               {nullptr, [&](const TrajectoryStep &t) {
                    running += t.reward;
                    ++length;
                    if (t.episode_end) {
                        ++counts[static_cast<std::size_t>(running + 1.0)];
                        ++episodes;
                        longest = std::max(longest, length);
                        running = 0.0;
                        length = 0;
                    }
                }});
    CHECK(longest <= bj.max_episode_length());
    for (int k = 0; k < 3; ++k) {
        const double p = law[k];
        const double freq = static_cast<double>(counts[k]) / episodes;
        const double se = std::sqrt(p * (1 - p) / episodes);
        CAPTURE(k);
        CHECK(std::abs(freq - p) <= 3.0 * se);
    }
}

TEST_CASE("minipong state encoding round-trips") {
    MiniPong env;
    CHECK(env.num_states() == 14ull * 16 * 4 * 14 * 14);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const auto s = uniform_index(rng, env.num_states());
        CHECK(env.encode(env.decode(s)) == s);
    }
    CHECK_THROWS_AS(MiniPong({4, 16, 3, 0.1}), InputError);
}

TEST_CASE("minipong rules") {
    MiniPong env({10, 10, 3, 0.1});
    using S = MiniPong::State;
    const S serve{5, 2, -1, 1, 0, 0};

    SUBCASE("ball moves diagonally") {
        const S st{4, 4, 1, 1, 0, 0};
        const auto r = env.step_with(st, MiniPong::kNoop, false, serve);
        const auto n = env.decode(r.next);
        CHECK(n.ball_x == 5);
        CHECK(n.ball_y == 5);
        CHECK(r.reward == 0.0);
    }
    SUBCASE("wall bounce") {
        const S st{4, 9, 1, 1, 0, 0};
        const auto n = env.decode(env.step_with(st, MiniPong::kNoop, false, serve).next);
        CHECK(n.vy == -1);
        CHECK(n.ball_y == 8);
    }
    SUBCASE("agent paddle returns the ball") {
        const S st{8, 4, 1, 1, 4, 0};
        const auto r = env.step_with(st, MiniPong::kNoop, false, serve);
        const auto n = env.decode(r.next);
        CHECK(r.reward == 0.0);
        CHECK(n.vx == -1);
        CHECK(n.ball_x == 7);
    }
    SUBCASE("agent miss costs a point and re-serves") {
        const S st{8, 4, 1, 1, 0, 3};
        const auto r = env.step_with(st, MiniPong::kDown, false, serve);
        const auto n = env.decode(r.next);
        CHECK(r.reward == -1.0);
        CHECK(n.ball_x == serve.ball_x);
        CHECK(n.ball_y == serve.ball_y);
        CHECK(n.agent_top == 1); // paddles keep their positions
        CHECK(n.opponent_top == 3);
    }
    SUBCASE("opponent miss scores for the agent") {
        const S st{1, 1, -1, 1, 0, 7};
        CHECK(env.step_with(st, MiniPong::kNoop, false, serve).reward == 1.0);
    }
    SUBCASE("opponent tracks the ball when it moves") {
        const S st{5, 8, 1, 1, 0, 0};
        CHECK(env.decode(env.step_with(st, MiniPong::kNoop, true, serve).next).opponent_top == 1);
        CHECK(env.decode(env.step_with(st, MiniPong::kNoop, false, serve).next).opponent_top == 0);
    }
    SUBCASE("paddle clamps at the walls") {
        const S st{5, 5, 1, 1, 0, 0};
        CHECK(env.decode(env.step_with(st, MiniPong::kUp, false, serve).next).agent_top == 0);
    }
    CHECK_THROWS_AS(env.step_with(S{5, 5, 1, 1, 0, 0}, 3, false, serve), InputError);
}

TEST_CASE("minipong factor view") {
    MiniPong env;
    const auto layout = env.factor_layout();
    CHECK(layout.size() == 256);
    CHECK(layout.grid_width == 16);
    std::vector<std::uint8_t> f(256);
    const MiniPong::State st{3, 7, 1, -1, 2, 5};
    env.factors(env.encode(st), f);
    CHECK(std::count(f.begin(), f.end(), MiniPong::kAgentPaddle) == 3);
    CHECK(std::count(f.begin(), f.end(), MiniPong::kOpponentPaddle) == 3);
    CHECK(f[7 * 16 + 3] == MiniPong::kBallBase + 2);
    CHECK(f[2 * 16 + 15] == MiniPong::kAgentPaddle);
    CHECK(f[5 * 16 + 0] == MiniPong::kOpponentPaddle);
}

TEST_CASE("explicit mdp text format") {
    const char *text = R"(# two states
states 2
actions 2
rewards 0 1
start 0 0.25
start 1 0.75
policy 0 0 1
policy 1 0 0.5
policy 1 1 0.5
0 0 1 1 1
0 1 0 0 1
1 0 0 0 0.5
1 0 1 1 0.5
1 1 1 0 1
)";
    std::istringstream in(text);
    const auto file = parse_explicit_mdp(in);
    CHECK(file.mdp.num_states() == 2);
    CHECK(file.mdp.start() == std::vector<double>{0.25, 0.75});
    REQUIRE(file.policy);
    CHECK(file.policy->prob(1, 1) == 0.5);
    CHECK(file.mdp.outcomes(1, 0).size() == 2);

    std::ostringstream out;
    write_explicit_mdp(out, file.mdp, &*file.policy);
    std::istringstream again(out.str());
    const auto back = parse_explicit_mdp(again);
    for (StateIndex s = 0; s < 2; ++s) {
        for (Action a = 0; a < 2; ++a) {
            CHECK(back.mdp.outcomes(s, a) == file.mdp.outcomes(s, a));
            CHECK(back.policy->prob(s, a) == file.policy->prob(s, a));
        }
    }
}

TEST_CASE("explicit mdp parse errors carry the line number") {
    auto line_of = [](const std::string &text) -> std::size_t {
        std::istringstream in(text);
        try {
            parse_explicit_mdp(in);
        } catch (const ParseError &e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("states 1\nactions 1\nrewards 0\n0 0 0 0 1\nbogus\n") == 5);
    CHECK(line_of("states 1\nactions 1\nrewards 0\n0 0 3 0 1\n") == 4);     // bad next state
    CHECK(line_of("states 1\nactions 1\nrewards 0\n0 0 0 7 1\n") == 4);     // undeclared reward
    CHECK(line_of("states 1\nactions 1\nrewards 0\n0 0 0 0 0.5\n") != 0);   // kernel not normalized
    CHECK(line_of("states 2\nactions 1\nrewards 0\npolicy 0 0 0.4\n0 0 0 0 1\n1 0 0 0 1\n") != 0);
}

TEST_CASE("policy rows must be distributions") {
    CHECK_THROWS_AS(Policy(1, 2, {0.5, 0.6}), InputError);
    CHECK_NOTHROW(Policy(1, 2, {0.5, 0.5}));
    const std::vector<Action> choice{1, 0};
    const auto d = Policy::deterministic(2, choice);
    CHECK(d.prob(0, 1) == 1.0);
    CHECK(d.prob(1, 1) == 0.0);
}

TEST_CASE("achievable returns") {
    const std::vector<double> r{0.0, 1.0};
    CHECK(achievable_returns(r, 3, false) == std::vector<double>{0, 1, 2, 3});
    const std::vector<double> r2{-1.0, 2.0};
    CHECK(achievable_returns(r2, 2, false) == std::vector<double>{-2, 1, 4});
    CHECK(achievable_returns(r2, 2, true) == std::vector<double>{-2, -1, 1, 2, 4});
}

TEST_CASE("trajectories are reproducible from the seed") {
    MiniPong env;
    const Policy pi(3);
    const auto a = run_policy(env, pi, 2000, 99);
    const auto b = run_policy(env, pi, 2000, 99);
    const auto c = run_policy(env, pi, 2000, 100);
    std::ostringstream sa, sb, sc;
    write_trajectory_csv(sa, a);
    write_trajectory_csv(sb, b);
    write_trajectory_csv(sc, c);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str() != sc.str());
    CHECK(sa.str().rfind("step,episode,action,state,reward\n", 0) == 0);
}

TEST_CASE("episodic trajectories restart after terminal steps") {
    Blackjack bj;
    const auto t = run_policy(bj, blackjack_target_policy(), 5000, 1);
    std::uint64_t episodes = 0;
    for (const auto &s : t.steps) {
        if (s.episode_end) {
            ++episodes;
        } else {
            CHECK(s.reward == 0.0);
        }
    }
    CHECK(t.starts.size() >= episodes);
}
