#pragma once

#include "cnc/oracle/stationary.hpp"

#include <array>

namespace cnc::oracle {

// Q(s, a) table with a definedness mask.
struct QTable {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> values;   // s * num_actions + a
    std::vector<std::uint8_t> defined;

    QTable() = default;
    QTable(std::size_t s, std::size_t a)
        : num_states(s), num_actions(a), values(s * a, 0.0), defined(s * a, 0) {}
    double at(std::size_t s, std::size_t a) const { return values[s * num_actions + a]; }
    bool is_defined(std::size_t s, std::size_t a) const { return defined[s * num_actions + a] != 0; }
};

// Largest |p - q| over entries defined in both; -1 when none are.
double sup_distance(const QTable &p, const QTable &q);

// Joint stationary law of (Z', S'_0, A'_1) under the snake chain, where
// Z' = R'_1 + ... + R'_m, and the conditionals built from it.
struct ReturnMarginals {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> z_values;       // ascending
    std::vector<double> joint;          // (z * S + s) * A + a

    double joint_at(std::size_t z, std::size_t s, std::size_t a) const {
        return joint[(z * num_states + s) * num_actions + a];
    }
    double nu_za(std::size_t z, std::size_t a) const;
    double nu_a(std::size_t a) const;
    double nu_sa(std::size_t s, std::size_t a) const;
    double nu_s_given_za(std::size_t s, std::size_t z, std::size_t a) const;
    double nu_z_given_a(std::size_t z, std::size_t a) const;
    double nu_z_given_sa(std::size_t z, std::size_t s, std::size_t a) const;
};

ReturnMarginals return_marginals(const AugmentedChain &aug, const SnakeChain &snake,
                                 const StationaryResult &stationary);

// Q(s,a) = sum_z z nu(s|z,a) nu(z|a) / sum_z' nu(s|z',a) nu(z'|a); entries
// with nu(s, a) = 0 are undefined.
QTable exact_q_via_nu(const ReturnMarginals &marginals);

// m-step backward induction: Q_k(s,a) = sum mu(s',r|s,a) (r + V_{k-1}(s')),
// V_k(s) = sum_a pi(a|s) Q_k(s,a), V_0 = 0. Every entry is defined.
QTable exact_q_via_dp(const envs::ExplicitMdp &mdp, const envs::Policy &policy, std::size_t m);

// Law of the m-step return given (s, a), over achievable_returns(rewards, m).
struct ReturnDistribution {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> z_values;
    std::vector<double> prob; // ((s * A) + a) * |Z| + z
    double at(std::size_t s, std::size_t a, std::size_t z) const {
        return prob[(s * num_actions + a) * z_values.size() + z];
    }
};
ReturnDistribution return_distribution_dp(const envs::ExplicitMdp &mdp, const envs::Policy &policy,
                                          std::size_t m);

// Everything from one explicit MDP: chains, stationary law, both Q tables.
struct OracleReport {
    AugmentedChain augmented;
    ChainProperties augmented_properties;
    SnakeChain snake;
    StationaryResult stationary;
    ReturnMarginals marginals;
    QTable q_nu;
    QTable q_dp;
    double gap = 0.0; // sup |q_nu - q_dp| over defined entries
};
OracleReport run_oracle(const envs::ExplicitMdp &mdp, const envs::Policy &policy, std::size_t m,
                        const SolveOptions &opts = {}, std::size_t cap = kDefaultSnakeCap);

// Exact Blackjack values under a policy on the 200 states: hits recurse on
// the (acyclic) player-sum graph, stays use the dealer's exact outcome law.
QTable blackjack_exact_q(const envs::Policy &policy);
// Law of the episode return {-1, 0, +1} after taking a in s, then policy.
std::array<double, 3> blackjack_return_law(const envs::Policy &policy, std::size_t s,
                                           std::size_t a);
// Law of the episode return from the start distribution.
std::array<double, 3> blackjack_episode_return_law(const envs::Policy &policy);

} // namespace cnc::oracle
