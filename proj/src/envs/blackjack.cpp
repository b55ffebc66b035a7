#include "cnc/envs/blackjack.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace cnc::envs {

namespace {

// Longest agent path: hits from the worst start plus the final move.
std::size_t longest_episode() {
    std::map<std::pair<int, bool>, std::size_t> memo;
    std::function<std::size_t(int, bool)> hits = [&](int sum, bool ace) -> std::size_t {
        auto key = std::make_pair(sum, ace);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        std::size_t best = 0;
        for (int c = 1; c <= 10; ++c) {
            int s = sum;
            bool u = ace;
            if (Blackjack::hit(s, u, c)) {
                best = std::max(best, 1 + hits(s, u));
            }
        }
        memo[key] = best;
        return best;
    };
    std::size_t longest = 0;
    for (int sum = 12; sum <= 21; ++sum) {
        for (bool ace : {false, true}) {
            longest = std::max(longest, hits(sum, ace) + 1);
        }
    }
    return longest;
}

} // namespace

Blackjack::Blackjack() : max_length_(longest_episode()) {}

StateIndex Blackjack::encode(const BlackjackState &st) {
    if (st.dealer < 1 || st.dealer > 10 || st.player < 12 || st.player > 21) {
        throw InputError("blackjack state out of range");
    }
    return static_cast<StateIndex>(((st.dealer - 1) * 10 + (st.player - 12)) * 2 +
                                   (st.usable_ace ? 1 : 0));
}

BlackjackState Blackjack::decode(StateIndex s) {
    if (s >= kStates) {
        throw InputError("blackjack state index out of range");
    }
    const int i = static_cast<int>(s);
    return {i / 20 + 1, (i / 2) % 10 + 12, (i % 2) == 1};
}

double Blackjack::card_prob(int value) {
    if (value < 1 || value > 10) {
        return 0.0;
    }
    return value == 10 ? 4.0 / 13.0 : 1.0 / 13.0;
}

int Blackjack::draw_card(Rng &rng) {
    return std::min(10, static_cast<int>(uniform_index(rng, 13)) + 1);
}

bool Blackjack::hit(int &sum, bool &usable_ace, int card) {
    int hard = usable_ace ? sum - 10 : sum;
    // An ace only becomes usable on a hard total of at most 10, which never
    // occurs for hands already at 12 or more.
    const bool soft = (usable_ace || card == 1) && hard + card + 10 <= 21;
    hard += card;
    sum = soft ? hard + 10 : hard;
    usable_ace = soft;
    return sum <= 21;
}

namespace {

// Hand accumulation from scratch, used by start states and the dealer.
struct Hand {
    int hard = 0;
    bool ace = false;
    void add(int card) {
        hard += card;
        ace = ace || card == 1;
    }
    bool usable() const { return ace && hard + 10 <= 21; }
    int total() const { return usable() ? hard + 10 : hard; }
};

} // namespace

int Blackjack::play_dealer(int showing, Rng &rng) {
    Hand h;
    h.add(showing);
    h.add(draw_card(rng));
    while (h.total() < 17) {
        h.add(draw_card(rng));
    }
    return h.total();
}

std::array<double, 6> Blackjack::dealer_outcome(int showing) {
    std::map<std::pair<int, bool>, std::array<double, 6>> memo;
    std::function<std::array<double, 6>(Hand)> go = [&](Hand h) {
        std::array<double, 6> out{};
        const int t = h.total();
        if (t >= 17) {
            out[t > 21 ? 5 : t - 17] = 1.0;
            return out;
        }
        auto key = std::make_pair(h.hard, h.ace);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        for (int c = 1; c <= 10; ++c) {
            Hand next = h;
            next.add(c);
            const auto sub = go(next);
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] += card_prob(c) * sub[i];
            }
        }
        memo[key] = out;
        return out;
    };
    Hand h;
    h.add(showing);
    // The hidden card is drawn before the dealer's first decision, and
    // a one-card hand is always below 17, so recursing from it is exact.
    return go(h);
}

std::vector<double> Blackjack::start_distribution() {
    // Player hands evolve from two cards with forced hits below 12.
    std::vector<double> player(kStates / 10, 0.0); // index (sum-12)*2+ace
    std::function<void(Hand, double)> grow = [&](Hand h, double p) {
        if (h.total() >= 12) {
            player[static_cast<std::size_t>((h.total() - 12) * 2 + (h.usable() ? 1 : 0))] += p;
            return;
        }
        for (int c = 1; c <= 10; ++c) {
            Hand next = h;
            next.add(c);
            grow(next, p * card_prob(c));
        }
    };
    for (int c1 = 1; c1 <= 10; ++c1) {
        for (int c2 = 1; c2 <= 10; ++c2) {
            Hand h;
            h.add(c1);
            h.add(c2);
            grow(h, card_prob(c1) * card_prob(c2));
        }
    }
    std::vector<double> dist(kStates, 0.0);
    for (int d = 1; d <= 10; ++d) {
        for (std::size_t k = 0; k < player.size(); ++k) {
            dist[static_cast<std::size_t>(d - 1) * player.size() + k] = card_prob(d) * player[k];
        }
    }
    return dist;
}

StateIndex Blackjack::initial_state(Rng &rng) const {
    Hand h;
    h.add(draw_card(rng));
    h.add(draw_card(rng));
    const int dealer = draw_card(rng);
    while (h.total() < 12) {
        h.add(draw_card(rng));
    }
    return encode({dealer, h.total(), h.usable()});
}

StepResult Blackjack::step(StateIndex s, Action a, Rng &rng) const {
    BlackjackState st = decode(s);
    if (a == kHit) {
        if (!hit(st.player, st.usable_ace, draw_card(rng))) {
            return {0, -1.0, true};
        }
        return {encode(st), 0.0, false};
    }
    if (a != kStay) {
        throw InputError("blackjack action must be hit (0) or stay (1)");
    }
    const int dealer = play_dealer(st.dealer, rng);
    double r = 0.0;
    if (dealer > 21 || st.player > dealer) {
        r = 1.0;
    } else if (st.player < dealer) {
        r = -1.0;
    }
    return {0, r, true};
}

std::vector<double> Blackjack::return_values(std::size_t) const { return rewards_; }

Policy blackjack_target_policy() {
    std::vector<Action> choice(Blackjack::kStates);
    for (StateIndex s = 0; s < Blackjack::kStates; ++s) {
        choice[s] = Blackjack::decode(s).player >= 20 ? Blackjack::kStay : Blackjack::kHit;
    }
    return Policy::deterministic(2, choice);
}

} // namespace cnc::envs
