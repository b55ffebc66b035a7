#include "cnc/oracle/random_mdp.hpp"

#include "cnc/error.hpp"
#include "cnc/oracle/chain.hpp"

#include <algorithm>
#include <numeric>

namespace cnc::oracle {

namespace {

std::size_t pick(Rng &rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(uniform_index(rng, hi - lo + 1));
}

// k positive weights summing to exactly 1 in floating point.
std::vector<double> random_simplex(Rng &rng, std::size_t k) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (auto &x : w) {
        x = 0.1 + uniform01(rng);
        sum += x;
    }
    double used = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        w[i] /= sum;
        used += w[i];
    }
    w[k - 1] = 1.0 - used;
    return w;
}

} // namespace

RandomMdp random_mdp(Rng &rng, const RandomMdpOptions &opts) {
    const std::size_t S = pick(rng, std::min(opts.min_states, opts.max_states), opts.max_states);
    const std::size_t A = pick(rng, 1, opts.max_actions);
    const std::size_t R = pick(rng, 1, opts.max_rewards);
    std::vector<double> pool{-2, -1, 0, 1, 2};
    for (std::size_t i = 0; i < R; ++i) {
        std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    }
    std::vector<double> rewards(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(R));
    std::sort(rewards.begin(), rewards.end());

    std::vector<std::vector<envs::Outcome>> kernel(S * A);
    for (auto &row : kernel) {
        const std::size_t k = pick(rng, 1, std::min(opts.max_outcomes, S * R));
        std::vector<std::size_t> cells(S * R);
        std::iota(cells.begin(), cells.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(cells[i], cells[i + uniform_index(rng, cells.size() - i)]);
        }
        std::sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(k));
        const auto w = random_simplex(rng, k);
        for (std::size_t i = 0; i < k; ++i) {
            row.push_back({cells[i] / R, rewards[cells[i] % R], w[i]});
        }
    }
    std::vector<double> table(S * A, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        const std::size_t k = pick(rng, 1, std::min(opts.max_support, A));
        std::vector<std::size_t> acts(A);
        std::iota(acts.begin(), acts.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(acts[i], acts[i + uniform_index(rng, acts.size() - i)]);
        }
        std::sort(acts.begin(), acts.begin() + static_cast<std::ptrdiff_t>(k));
        const auto w = random_simplex(rng, k);
        for (std::size_t i = 0; i < k; ++i) {
            table[s * A + acts[i]] = w[i];
        }
    }
    std::vector<double> start(S, 0.0);
    start[0] = 1.0;
    return {envs::ExplicitMdp(S, A, std::move(rewards), std::move(kernel), std::move(start)),
            envs::Policy(S, A, std::move(table))};
}

RandomMdp random_ergodic_mdp(Rng &rng, const RandomMdpOptions &opts, std::size_t max_tries) {
    for (std::size_t i = 0; i < max_tries; ++i) {
        auto r = random_mdp(rng, opts);
        const auto aug = build_augmented_chain(r.mdp, r.policy);
        const auto props = check_properties(aug.chain);
        std::vector<bool> seen(r.mdp.num_states(), false);
        for (const auto &t : aug.triples) {
            seen[t.state] = true;
        }
        const bool covers = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
        if (props.irreducible && props.aperiodic && covers) {
            return r;
        }
    }
    throw ResourceError("no irreducible aperiodic MDP found", max_tries);
}

} // namespace cnc::oracle
