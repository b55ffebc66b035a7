#include "cnc/oracle/q.hpp"

#include "cnc/envs/blackjack.hpp"
#include "cnc/error.hpp"

#include <algorithm>
#include <cmath>

namespace cnc::oracle {

double sup_distance(const QTable &p, const QTable &q) {
    if (p.values.size() != q.values.size()) {
        throw InputError("Q tables have different shapes");
    }
    double worst = -1.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (p.defined[i] && q.defined[i]) {
            worst = std::max(worst, std::abs(p.values[i] - q.values[i]));
        }
    }
    return worst;
}

namespace {

std::size_t z_index(const std::vector<double> &zs, double z) {
    auto it = std::lower_bound(zs.begin(), zs.end(), z - 1e-9);
    if (it == zs.end() || std::abs(*it - z) > 1e-9) {
        throw InputError("return outside the achievable set");
    }
    return static_cast<std::size_t>(it - zs.begin());
}

} // namespace

double ReturnMarginals::nu_za(std::size_t z, std::size_t a) const {
    double sum = 0.0;
    for (std::size_t s = 0; s < num_states; ++s) {
        sum += joint_at(z, s, a);
    }
    return sum;
}

double ReturnMarginals::nu_a(std::size_t a) const {
    double sum = 0.0;
    for (std::size_t z = 0; z < z_values.size(); ++z) {
        sum += nu_za(z, a);
    }
    return sum;
}

double ReturnMarginals::nu_sa(std::size_t s, std::size_t a) const {
    double sum = 0.0;
    for (std::size_t z = 0; z < z_values.size(); ++z) {
        sum += joint_at(z, s, a);
    }
    return sum;
}

double ReturnMarginals::nu_s_given_za(std::size_t s, std::size_t z, std::size_t a) const {
    const double d = nu_za(z, a);
    return d > 0.0 ? joint_at(z, s, a) / d : 0.0;
}

double ReturnMarginals::nu_z_given_a(std::size_t z, std::size_t a) const {
    const double d = nu_a(a);
    return d > 0.0 ? nu_za(z, a) / d : 0.0;
}

double ReturnMarginals::nu_z_given_sa(std::size_t z, std::size_t s, std::size_t a) const {
    const double d = nu_sa(s, a);
    return d > 0.0 ? joint_at(z, s, a) / d : 0.0;
}

ReturnMarginals return_marginals(const AugmentedChain &aug, const SnakeChain &snake,
                                 const StationaryResult &stationary) {
    ReturnMarginals out;
    out.num_states = aug.num_states;
    out.num_actions = aug.num_actions;
    out.z_values = envs::achievable_returns(aug.rewards, snake.horizon, false);
    out.joint.assign(out.z_values.size() * out.num_states * out.num_actions, 0.0);
    const std::size_t m = snake.horizon;
    for (std::size_t w = 0; w < snake.size(); ++w) {
        const std::uint32_t *win = snake.window(w);
        double z = 0.0;
        for (std::size_t i = 1; i <= m; ++i) {
            z += aug.rewards[aug.triples[win[i]].reward];
        }
        const std::size_t s = aug.triples[win[0]].state;
        const std::size_t a = aug.triples[win[1]].action;
        const std::size_t zi = z_index(out.z_values, z);
        out.joint[(zi * out.num_states + s) * out.num_actions + a] += stationary.nu[w];
    }
    return out;
}

QTable exact_q_via_nu(const ReturnMarginals &mg) {
    QTable q(mg.num_states, mg.num_actions);
    const std::size_t nz = mg.z_values.size();
    for (std::size_t a = 0; a < mg.num_actions; ++a) {
        std::vector<double> pz(nz);
        for (std::size_t z = 0; z < nz; ++z) {
            pz[z] = mg.nu_z_given_a(z, a);
        }
        for (std::size_t s = 0; s < mg.num_states; ++s) {
            if (mg.nu_sa(s, a) <= 0.0) {
                continue;
            }
            double num = 0.0;
            double den = 0.0;
            for (std::size_t z = 0; z < nz; ++z) {
                const double w = mg.nu_s_given_za(s, z, a) * pz[z];
                num += mg.z_values[z] * w;
                den += w;
            }
            if (den > 0.0) {
                q.values[s * mg.num_actions + a] = num / den;
                q.defined[s * mg.num_actions + a] = 1;
            }
        }
    }
    return q;
}

QTable exact_q_via_dp(const envs::ExplicitMdp &mdp, const envs::Policy &policy, std::size_t m) {
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    if (m == 0) {
        throw InputError("horizon must be at least 1");
    }
    std::vector<double> v(S, 0.0);
    QTable q(S, A);
    for (std::size_t k = 1; k <= m; ++k) {
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a = 0; a < A; ++a) {
                double acc = 0.0;
                for (const auto &o : mdp.outcomes(s, a)) {
                    acc += o.prob * (o.reward + v[o.next]);
                }
                q.values[s * A + a] = acc;
            }
        }
        for (std::size_t s = 0; s < S; ++s) {
            double acc = 0.0;
            for (std::size_t a = 0; a < A; ++a) {
                acc += policy.prob(s, a) * q.values[s * A + a];
            }
            v[s] = acc;
        }
    }
    std::fill(q.defined.begin(), q.defined.end(), 1);
    return q;
}

ReturnDistribution return_distribution_dp(const envs::ExplicitMdp &mdp, const envs::Policy &policy,
                                          std::size_t m) {
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    if (m == 0) {
        throw InputError("horizon must be at least 1");
    }
    const auto &rewards = mdp.rewards();
    // Laws of partial sums of k rewards live on achievable_returns(k); keep
    // every table on the final alphabet by tracking sums on the full set of
    // partial values.
    const auto all = envs::achievable_returns(rewards, m, true);
    auto with_zero = all;
    with_zero.push_back(0.0);
    std::sort(with_zero.begin(), with_zero.end());
    with_zero.erase(std::unique(with_zero.begin(), with_zero.end(),
                                [](double x, double y) { return std::abs(x - y) <= 1e-9; }),
                    with_zero.end());
    const std::size_t nv = with_zero.size();
    const std::size_t zero = z_index(with_zero, 0.0);

    // vlaw[s][v]: law of the remaining k-step return from state s under pi.
    std::vector<double> vlaw(S * nv, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        vlaw[s * nv + zero] = 1.0;
    }
    std::vector<double> qlaw(S * A * nv, 0.0);
    for (std::size_t k = 1; k <= m; ++k) {
        std::fill(qlaw.begin(), qlaw.end(), 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a = 0; a < A; ++a) {
                double *out = &qlaw[(s * A + a) * nv];
                for (const auto &o : mdp.outcomes(s, a)) {
                    for (std::size_t v = 0; v < nv; ++v) {
                        const double p = vlaw[o.next * nv + v];
                        if (p > 0.0) {
                            out[z_index(with_zero, with_zero[v] + o.reward)] += o.prob * p;
                        }
                    }
                }
            }
        }
        std::fill(vlaw.begin(), vlaw.end(), 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a = 0; a < A; ++a) {
                const double pa = policy.prob(s, a);
                for (std::size_t v = 0; v < nv && pa > 0.0; ++v) {
                    vlaw[s * nv + v] += pa * qlaw[(s * A + a) * nv + v];
                }
            }
        }
    }
    ReturnDistribution out;
    out.num_states = S;
    out.num_actions = A;
    out.z_values = envs::achievable_returns(rewards, m, false);
    const std::size_t nz = out.z_values.size();
    out.prob.assign(S * A * nz, 0.0);
    for (std::size_t sa = 0; sa < S * A; ++sa) {
        for (std::size_t v = 0; v < nv; ++v) {
            const double p = qlaw[sa * nv + v];
            if (p > 0.0) {
                out.prob[sa * nz + z_index(out.z_values, with_zero[v])] += p;
            }
        }
    }
    return out;
}

OracleReport run_oracle(const envs::ExplicitMdp &mdp, const envs::Policy &policy, std::size_t m,
                        const SolveOptions &opts, std::size_t cap) {
    OracleReport rep;
    rep.augmented = build_augmented_chain(mdp, policy);
    rep.augmented_properties = check_properties(rep.augmented.chain);
    rep.snake = build_snake_chain(rep.augmented, m, cap);
    rep.stationary = solve_stationary(rep.snake.chain, opts);
    rep.marginals = return_marginals(rep.augmented, rep.snake, rep.stationary);
    rep.q_nu = exact_q_via_nu(rep.marginals);
    rep.q_dp = exact_q_via_dp(mdp, policy, m);
    rep.gap = sup_distance(rep.q_nu, rep.q_dp);
    return rep;
}

namespace {

using envs::Blackjack;

struct BlackjackSolver {
    const envs::Policy &policy;
    // law[s][a] over returns {-1, 0, +1}; filled lazily on the acyclic hit graph.
    std::vector<std::array<double, 3>> law = std::vector<std::array<double, 3>>(400);
    std::vector<std::uint8_t> done = std::vector<std::uint8_t>(400, 0);

    std::array<double, 3> stay(const envs::BlackjackState &st) const {
        const auto d = Blackjack::dealer_outcome(st.dealer);
        std::array<double, 3> out{};
        out[2] += d[5];
        for (int t = 17; t <= 21; ++t) {
            const double p = d[static_cast<std::size_t>(t - 17)];
            out[st.player > t ? 2 : st.player < t ? 0 : 1] += p;
        }
        return out;
    }

    std::array<double, 3> value(std::size_t s) {
        std::array<double, 3> out{};
        for (std::size_t a = 0; a < 2; ++a) {
            const double pa = policy.prob(s, a);
            if (pa > 0.0) {
                const auto l = of(s, a);
                for (int k = 0; k < 3; ++k) {
                    out[k] += pa * l[k];
                }
            }
        }
        return out;
    }

    std::array<double, 3> of(std::size_t s, std::size_t a) {
        const std::size_t i = s * 2 + a;
        if (done[i]) {
            return law[i];
        }
        const auto st = Blackjack::decode(s);
        std::array<double, 3> out{};
        if (a == Blackjack::kStay) {
            out = stay(st);
        } else {
            for (int c = 1; c <= 10; ++c) {
                int sum = st.player;
                bool ace = st.usable_ace;
                const double pc = Blackjack::card_prob(c);
                if (!Blackjack::hit(sum, ace, c)) {
                    out[0] += pc;
                    continue;
                }
                const auto next = value(Blackjack::encode({st.dealer, sum, ace}));
                for (int k = 0; k < 3; ++k) {
                    out[k] += pc * next[k];
                }
            }
        }
        law[i] = out;
        done[i] = 1;
        return out;
    }
};

} // namespace

QTable blackjack_exact_q(const envs::Policy &policy) {
    BlackjackSolver solver{policy};
    QTable q(Blackjack::kStates, 2);
    for (std::size_t s = 0; s < Blackjack::kStates; ++s) {
        for (std::size_t a = 0; a < 2; ++a) {
            const auto l = solver.of(s, a);
            q.values[s * 2 + a] = l[2] - l[0];
            q.defined[s * 2 + a] = 1;
        }
    }
    return q;
}

std::array<double, 3> blackjack_return_law(const envs::Policy &policy, std::size_t s,
                                           std::size_t a) {
    BlackjackSolver solver{policy};
    return solver.of(s, a);
}

std::array<double, 3> blackjack_episode_return_law(const envs::Policy &policy) {
    BlackjackSolver solver{policy};
    const auto start = Blackjack::start_distribution();
    std::array<double, 3> out{};
    for (std::size_t s = 0; s < Blackjack::kStates; ++s) {
        const auto l = solver.value(s);
        for (int k = 0; k < 3; ++k) {
            out[k] += start[s] * l[k];
        }
    }
    return out;
}

} // namespace cnc::oracle
