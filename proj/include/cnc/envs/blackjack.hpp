#pragma once

#include "cnc/envs/environment.hpp"

#include <array>

namespace cnc::envs {

struct BlackjackState {
    int dealer = 1;  // showing card, 1 (ace) .. 10
    int player = 12; // 12 .. 21
    bool usable_ace = false;

    bool operator==(const BlackjackState &) const = default;
};

// Infinite-deck Blackjack with forced hits below 12, dealer standing on
// all 17s, and naturals scored like any other hand.
class Blackjack final : public Environment {
public:
    static constexpr std::uint64_t kStates = 200;
    static constexpr Action kHit = 0;
    static constexpr Action kStay = 1;

    Blackjack();

    std::string_view name() const override { return "blackjack"; }
    std::uint64_t num_states() const override { return kStates; }
    std::size_t num_actions() const override { return 2; }
    const std::vector<double> &rewards() const override { return rewards_; }
    bool episodic() const override { return true; }
    std::size_t max_episode_length() const override { return max_length_; }

    StateIndex initial_state(Rng &rng) const override;
    StepResult step(StateIndex s, Action a, Rng &rng) const override;
    std::vector<double> return_values(std::size_t m) const override;

    static StateIndex encode(const BlackjackState &st);
    static BlackjackState decode(StateIndex s);

    // Card value distribution: 1..9 with 1/13 each, 10 with 4/13.
    static double card_prob(int value);
    static int draw_card(Rng &rng);

    // Player hand after hitting with `card`; nullopt-like: returns false on bust.
    static bool hit(int &sum, bool &usable_ace, int card);

    // Exact distribution of the dealer's final total given the showing card:
    // indices 0..4 are totals 17..21, index 5 is bust.
    static std::array<double, 6> dealer_outcome(int showing);
    // Exact distribution over starting states.
    static std::vector<double> start_distribution();

    // Plays the dealer's hand from the showing card; returns the final total
    // (> 21 means bust).
    static int play_dealer(int showing, Rng &rng);

private:
    std::vector<double> rewards_{-1.0, 0.0, 1.0};
    std::size_t max_length_;
};

// Stays on 20 or 21, hits otherwise.
Policy blackjack_target_policy();

} // namespace cnc::envs
