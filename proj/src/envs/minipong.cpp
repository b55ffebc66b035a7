#include "cnc/envs/minipong.hpp"

#include "cnc/error.hpp"

#include <algorithm>

namespace cnc::envs {

MiniPong::MiniPong(MiniPongOptions opts) : opts_(opts) {
    if (opts_.width < 8 || opts_.height < 8) {
        throw InputError("minipong grid must be at least 8x8");
    }
    if (opts_.paddle_height < 1 || opts_.paddle_height >= opts_.height) {
        throw InputError("minipong paddle height must be in [1, height)");
    }
    if (opts_.opponent_failure < 0.0 || opts_.opponent_failure > 1.0) {
        throw InputError("minipong opponent failure rate must be in [0, 1]");
    }
    paddle_positions_ = opts_.height - opts_.paddle_height + 1;
    num_states_ = static_cast<std::uint64_t>(opts_.width - 2) * opts_.height * 4 *
                  paddle_positions_ * paddle_positions_;
}

StateIndex MiniPong::encode(const State &st) const {
    std::uint64_t i = static_cast<std::uint64_t>(st.ball_x - 1);
    i = i * opts_.height + static_cast<std::uint64_t>(st.ball_y);
    i = i * 2 + (st.vx > 0 ? 1 : 0);
    i = i * 2 + (st.vy > 0 ? 1 : 0);
    i = i * paddle_positions_ + static_cast<std::uint64_t>(st.agent_top);
    i = i * paddle_positions_ + static_cast<std::uint64_t>(st.opponent_top);
    return i;
}

MiniPong::State MiniPong::decode(StateIndex s) const {
    if (s >= num_states_) {
        throw InputError("minipong state index out of range");
    }
    const auto pp = static_cast<std::uint64_t>(paddle_positions_);
    State st;
    st.opponent_top = static_cast<int>(s % pp);
    s /= pp;
    st.agent_top = static_cast<int>(s % pp);
    s /= pp;
    st.vy = (s % 2) ? 1 : -1;
    s /= 2;
    st.vx = (s % 2) ? 1 : -1;
    s /= 2;
    st.ball_y = static_cast<int>(s % static_cast<std::uint64_t>(opts_.height));
    s /= static_cast<std::uint64_t>(opts_.height);
    st.ball_x = static_cast<int>(s) + 1;
    return st;
}

coding::FactorLayout MiniPong::factor_layout() const {
    coding::FactorLayout layout;
    layout.alphabets.assign(static_cast<std::size_t>(opts_.width * opts_.height), kCellAlphabet);
    layout.grid_width = static_cast<std::size_t>(opts_.width);
    return layout;
}

void MiniPong::factors(StateIndex s, std::span<std::uint8_t> out) const {
    const auto w = static_cast<std::size_t>(opts_.width);
    if (out.size() != w * static_cast<std::size_t>(opts_.height)) {
        throw InputError("minipong factor buffer has wrong size");
    }
    const State st = decode(s);
    std::fill(out.begin(), out.end(), kEmpty);
    for (int k = 0; k < opts_.paddle_height; ++k) {
        out[static_cast<std::size_t>(st.agent_top + k) * w + w - 1] = kAgentPaddle;
        out[static_cast<std::size_t>(st.opponent_top + k) * w] = kOpponentPaddle;
    }
    out[static_cast<std::size_t>(st.ball_y) * w + static_cast<std::size_t>(st.ball_x)] =
        static_cast<std::uint8_t>(kBallBase + (st.vx > 0 ? 2 : 0) + (st.vy > 0 ? 1 : 0));
}

MiniPong::State MiniPong::serve(Rng &rng, const State &from) const {
    State st = from;
    st.ball_x = opts_.width / 2;
    st.ball_y = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(opts_.height)));
    st.vx = uniform_index(rng, 2) ? 1 : -1;
    st.vy = uniform_index(rng, 2) ? 1 : -1;
    return st;
}

StateIndex MiniPong::initial_state(Rng &rng) const {
    State st;
    st.agent_top = (opts_.height - opts_.paddle_height) / 2;
    st.opponent_top = st.agent_top;
    return encode(serve(rng, st));
}

StepResult MiniPong::step_with(const State &cur, Action a, bool opponent_moves,
                               const State &serve_state) const {
    State st = cur;
    const int max_top = paddle_positions_ - 1;
    if (a == kUp) {
        st.agent_top = std::max(0, st.agent_top - 1);
    } else if (a == kDown) {
        st.agent_top = std::min(max_top, st.agent_top + 1);
    } else if (a != kNoop) {
        throw InputError("minipong action must be 0 (up), 1 (down) or 2 (noop)");
    }
    // The opponent reacts to where the ball was at the start of the step.
    if (opponent_moves) {
        const int centre = st.opponent_top + opts_.paddle_height / 2;
        if (centre < cur.ball_y) {
            st.opponent_top = std::min(max_top, st.opponent_top + 1);
        } else if (centre > cur.ball_y) {
            st.opponent_top = std::max(0, st.opponent_top - 1);
        }
    }

    int ny = st.ball_y + st.vy;
    if (ny < 0 || ny >= opts_.height) {
        st.vy = -st.vy;
        ny = st.ball_y + st.vy;
    }
    const int nx = st.ball_x + st.vx;
    auto covers = [&](int top) { return ny >= top && ny < top + opts_.paddle_height; };

    double reward = 0.0;
    if (nx == opts_.width - 1) {
        if (covers(st.agent_top)) {
            st.vx = -1;
            st.ball_x -= 1;
        } else {
            reward = -1.0;
        }
    } else if (nx == 0) {
        if (covers(st.opponent_top)) {
            st.vx = 1;
            st.ball_x += 1;
        } else {
            reward = 1.0;
        }
    } else {
        st.ball_x = nx;
    }
    st.ball_y = ny;
    if (reward != 0.0) {
        State next = serve_state;
        next.agent_top = st.agent_top;
        next.opponent_top = st.opponent_top;
        return {encode(next), reward, false};
    }
    return {encode(st), 0.0, false};
}

StepResult MiniPong::step(StateIndex s, Action a, Rng &rng) const {
    const State cur = decode(s);
    const bool moves = uniform01(rng) >= opts_.opponent_failure;
    // The serve is drawn every step so the stream consumption does not depend
    // on whether a point was scored.
    const State srv = serve(rng, cur);
    return step_with(cur, a, moves, srv);
}

} // namespace cnc::envs
