#pragma once

#include "cnc/envs/environment.hpp"

namespace cnc::envs {

struct MiniPongOptions {
    int width = 16;
    int height = 16;
    int paddle_height = 3;
    double opponent_failure = 0.1; // chance the opponent skips a tracking move
};

// Two-paddle Pong on a cell grid. The agent paddle sits in the rightmost
// column, the opponent in the leftmost. The ball moves one cell diagonally
// per step and bounces off the top and bottom walls and off paddles. When a
// paddle misses, the point goes to the other side (+1 if the opponent
// missed, -1 if the agent missed) and the ball is re-served from the centre.
class MiniPong final : public Environment {
public:
    static constexpr Action kUp = 0;
    static constexpr Action kDown = 1;
    static constexpr Action kNoop = 2;

    // Cell alphabet of the factored view.
    static constexpr std::uint8_t kEmpty = 0;
    static constexpr std::uint8_t kAgentPaddle = 1;
    static constexpr std::uint8_t kOpponentPaddle = 2;
    static constexpr std::uint8_t kBallBase = 3; // + 2*(vx>0) + (vy>0)
    static constexpr std::uint8_t kCellAlphabet = 7;

    struct State {
        int ball_x = 0;
        int ball_y = 0;
        int vx = 1; // +1 toward the agent
        int vy = 1; // +1 downward
        int agent_top = 0;
        int opponent_top = 0;

        bool operator==(const State &) const = default;
    };

    explicit MiniPong(MiniPongOptions opts = {});

    std::string_view name() const override { return "minipong"; }
    std::uint64_t num_states() const override { return num_states_; }
    std::size_t num_actions() const override { return 3; }
    const std::vector<double> &rewards() const override { return rewards_; }
    bool episodic() const override { return false; }

    coding::FactorLayout factor_layout() const override;
    void factors(StateIndex s, std::span<std::uint8_t> out) const override;

    StateIndex initial_state(Rng &rng) const override;
    StepResult step(StateIndex s, Action a, Rng &rng) const override;

    const MiniPongOptions &options() const { return opts_; }
    StateIndex encode(const State &st) const;
    State decode(StateIndex s) const;
    // Deterministic part of a step, given the opponent's tracking outcome and
    // the serve drawn if a point is scored.
    StepResult step_with(const State &st, Action a, bool opponent_moves,
                         const State &serve) const;
    State serve(Rng &rng, const State &from) const;

private:
    MiniPongOptions opts_;
    int paddle_positions_;
    std::uint64_t num_states_;
    std::vector<double> rewards_{-1.0, 0.0, 1.0};
};

} // namespace cnc::envs
