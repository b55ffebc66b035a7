#pragma once

#include "cnc/envs/explicit_mdp.hpp"

#include <cstdint>
#include <vector>

namespace cnc::oracle {

// Row-stochastic sparse matrix in CSR form.
struct SparseChain {
    std::size_t size = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> prob;

    std::size_t edges() const { return col.size(); }
    // Largest |row sum - 1|.
    double max_row_error() const;
    // Incoming-edge (CSC) copy, used by pull-style matrix-vector products.
    SparseChain transposed() const;
};

struct ChainProperties {
    bool irreducible = false;
    bool aperiodic = false; // every closed class has period 1
    bool positive_recurrent = false;
    std::size_t components = 0; // strongly connected components
    std::size_t period = 0;     // of the chain when irreducible
};

ChainProperties check_properties(const SparseChain &chain);

// Augmented chain: states are triples (a, s, r) reached with positive
// probability from the start distribution, with
// P((a,s,r) -> (a',s',r')) = pi(a'|s) mu(s',r'|s,a'). When the triples have
// a single closed class, the transient ones (typically entered only from a
// start state that never recurs) are dropped.
struct Triple {
    std::uint32_t action = 0;
    std::uint32_t state = 0;
    std::uint32_t reward = 0; // index into the MDP's reward list

    bool operator==(const Triple &) const = default;
};

struct AugmentedChain {
    SparseChain chain;
    std::vector<Triple> triples;
    std::size_t num_states = 0; // |S| of the MDP
    std::size_t num_actions = 0;
    std::vector<double> rewards;
};

AugmentedChain build_augmented_chain(const envs::ExplicitMdp &mdp, const envs::Policy &policy);

// The chain on (A, S) pairs that the augmented chain extends, pruned the
// same way.
SparseChain build_action_state_chain(const envs::ExplicitMdp &mdp, const envs::Policy &policy);

// Snake chain: windows (y_0, ..., y_m) of consecutive augmented
// states with positive probability; a transition shifts the window by one.
struct SnakeChain {
    SparseChain chain;
    std::size_t horizon = 0;              // m
    std::vector<std::uint32_t> windows;   // |W| x (m+1) augmented indices
    std::size_t width() const { return horizon + 1; }
    std::size_t size() const { return chain.size; }
    const std::uint32_t *window(std::size_t w) const { return windows.data() + w * width(); }
};

inline constexpr std::size_t kDefaultSnakeCap = 1'000'000;

SnakeChain build_snake_chain(const AugmentedChain &aug, std::size_t m,
                             std::size_t cap = kDefaultSnakeCap);

} // namespace cnc::oracle
