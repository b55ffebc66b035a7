#include "cnc/envs/explicit_mdp.hpp"

#include "cnc/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cnc::envs {

namespace {

constexpr double kRowTol = 1e-12;

} // namespace

ExplicitMdp::ExplicitMdp(std::size_t num_states, std::size_t num_actions,
                         std::vector<double> rewards, std::vector<std::vector<Outcome>> kernel,
                         std::vector<double> start)
    : num_states_(num_states), num_actions_(num_actions), rewards_(std::move(rewards)),
      kernel_(std::move(kernel)), start_(std::move(start)) {
    if (num_states_ == 0 || num_actions_ == 0) {
        throw InputError("explicit MDP needs at least one state and one action");
    }
    if (rewards_.empty()) {
        throw InputError("explicit MDP needs a reward list");
    }
    if (kernel_.size() != num_states_ * num_actions_) {
        throw InputError("explicit MDP kernel has wrong size");
    }
    for (std::size_t i = 0; i < kernel_.size(); ++i) {
        double sum = 0.0;
        for (const Outcome &o : kernel_[i]) {
            if (o.next >= num_states_) {
                throw InputError("explicit MDP transition to unknown state");
            }
            reward_index(o.reward);
            sum += o.prob;
        }
        if (std::abs(sum - 1.0) > kRowTol) {
            throw InputError("explicit MDP row (" + std::to_string(i / num_actions_) + "," +
                             std::to_string(i % num_actions_) + ") does not sum to 1");
        }
    }
    if (start_.size() != num_states_) {
        throw InputError("explicit MDP start distribution has wrong size");
    }
    double sum = 0.0;
    for (double p : start_) {
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTol) {
        throw InputError("explicit MDP start distribution does not sum to 1");
    }
}

std::size_t ExplicitMdp::reward_index(double r) const {
    for (std::size_t i = 0; i < rewards_.size(); ++i) {
        if (rewards_[i] == r) {
            return i;
        }
    }
    throw InputError("reward " + std::to_string(r) + " is not in the declared set");
}

const std::vector<Outcome> &ExplicitMdp::outcomes(StateIndex s, Action a) const {
    if (s >= num_states_ || a >= num_actions_) {
        throw InputError("explicit MDP state or action out of range");
    }
    return kernel_[s * num_actions_ + a];
}

namespace {

template <class Item, class Prob>
std::size_t sample_index(const std::vector<Item> &items, Prob prob, Rng &rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const double p = prob(items[i]);
        if (p <= 0.0) {
            continue;
        }
        acc += p;
        last = i;
        if (u < acc) {
            return i;
        }
    }
    return last;
}

} // namespace

StateIndex ExplicitMdp::initial_state(Rng &rng) const {
    return sample_index(start_, [](double p) { return p; }, rng);
}

StepResult ExplicitMdp::step(StateIndex s, Action a, Rng &rng) const {
    const auto &row = outcomes(s, a);
    const Outcome &o = row[sample_index(row, [](const Outcome &x) { return x.prob; }, rng)];
    return {o.next, o.reward, false};
}

namespace {

struct LineReader {
    std::istream &in;
    std::size_t line_no = 0;

    // Next non-empty line split into tokens, comments stripped.
    bool next(std::vector<std::string> &tokens) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            std::istringstream ss(line);
            tokens.clear();
            for (std::string t; ss >> t;) {
                tokens.push_back(t);
            }
            if (!tokens.empty()) {
                return true;
            }
        }
        return false;
    }
};

std::uint64_t parse_index(const std::string &t, std::size_t line, const char *what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        if (!t.empty() && t[0] == '-') {
            throw std::invalid_argument("negative");
        }
        v = std::stoull(t, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos != t.size() || t.empty()) {
        throw ParseError(line, std::string("bad ") + what + " '" + t + "'");
    }
    return v;
}

double parse_real(const std::string &t, std::size_t line, const char *what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos != t.size() || t.empty() || !std::isfinite(v)) {
        throw ParseError(line, std::string("bad ") + what + " '" + t + "'");
    }
    return v;
}

} // namespace

MdpFile parse_explicit_mdp(std::istream &in) {
    LineReader reader{in};
    std::vector<std::string> tok;
    std::optional<std::size_t> n_states, n_actions;
    std::vector<double> rewards;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> transitions, starts, policy_lines;

    while (reader.next(tok)) {
        const std::size_t ln = reader.line_no;
        const std::string &head = tok[0];
        if (head == "states" || head == "actions") {
            if (tok.size() != 2) {
                throw ParseError(ln, "expected '" + head + " N'");
            }
            const auto v = parse_index(tok[1], ln, "count");
            if (v == 0) {
                throw ParseError(ln, head + " must be positive");
            }
            (head == "states" ? n_states : n_actions) = v;
        } else if (head == "rewards") {
            if (tok.size() < 2) {
                throw ParseError(ln, "reward list is empty");
            }
            for (std::size_t i = 1; i < tok.size(); ++i) {
                const double r = parse_real(tok[i], ln, "reward");
                for (double x : rewards) {
                    if (x == r) {
                        throw ParseError(ln, "duplicate reward '" + tok[i] + "'");
                    }
                }
                rewards.push_back(r);
            }
        } else if (head == "start") {
            if (tok.size() != 2 && tok.size() != 3) {
                throw ParseError(ln, "expected 'start s [p]'");
            }
            starts.emplace_back(ln, tok);
        } else if (head == "policy") {
            if (tok.size() != 4) {
                throw ParseError(ln, "expected 'policy s a p'");
            }
            policy_lines.emplace_back(ln, tok);
        } else {
            if (tok.size() != 5) {
                throw ParseError(ln, "expected transition 's a s' r p'");
            }
            transitions.emplace_back(ln, tok);
        }
    }
    const std::size_t end_line = reader.line_no;
    if (!n_states || !n_actions || rewards.empty()) {
        throw ParseError(end_line, "missing 'states', 'actions' or 'rewards' header");
    }
    const std::size_t S = *n_states;
    const std::size_t A = *n_actions;
    auto check_state = [&](std::uint64_t s, std::size_t ln) {
        if (s >= S) {
            throw ParseError(ln, "state " + std::to_string(s) + " out of range");
        }
    };
    auto check_action = [&](std::uint64_t a, std::size_t ln) {
        if (a >= A) {
            throw ParseError(ln, "action " + std::to_string(a) + " out of range");
        }
    };

    std::vector<std::vector<Outcome>> kernel(S * A);
    std::vector<std::size_t> last_line(S * A, 0);
    for (const auto &[ln, t] : transitions) {
        const auto s = parse_index(t[0], ln, "state");
        const auto a = parse_index(t[1], ln, "action");
        const auto s2 = parse_index(t[2], ln, "next state");
        const double r = parse_real(t[3], ln, "reward");
        const double p = parse_real(t[4], ln, "probability");
        check_state(s, ln);
        check_action(a, ln);
        check_state(s2, ln);
        bool declared = false;
        for (double x : rewards) {
            declared = declared || x == r;
        }
        if (!declared) {
            throw ParseError(ln, "reward '" + t[3] + "' not in the declared list");
        }
        if (p < 0.0 || p > 1.0) {
            throw ParseError(ln, "probability outside [0,1]");
        }
        kernel[s * A + a].push_back({s2, r, p});
        last_line[s * A + a] = ln;
    }
    for (std::size_t i = 0; i < kernel.size(); ++i) {
        if (kernel[i].empty()) {
            throw ParseError(end_line, "no transitions for state " + std::to_string(i / A) +
                                           " action " + std::to_string(i % A));
        }
        double sum = 0.0;
        for (const auto &o : kernel[i]) {
            sum += o.prob;
        }
        if (std::abs(sum - 1.0) > kRowTol) {
            throw ParseError(last_line[i], "probabilities for state " + std::to_string(i / A) +
                                               " action " + std::to_string(i % A) +
                                               " sum to " + std::to_string(sum));
        }
    }

    std::vector<double> start(S, 0.0);
    if (starts.empty()) {
        start[0] = 1.0;
    } else {
        double sum = 0.0;
        for (const auto &[ln, t] : starts) {
            const auto s = parse_index(t[1], ln, "state");
            check_state(s, ln);
            const double p = t.size() == 3 ? parse_real(t[2], ln, "probability") : 1.0;
            if (p < 0.0 || p > 1.0) {
                throw ParseError(ln, "probability outside [0,1]");
            }
            start[s] += p;
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowTol) {
            throw ParseError(starts.back().first, "start probabilities do not sum to 1");
        }
    }

    std::optional<Policy> policy;
    if (!policy_lines.empty()) {
        std::vector<double> table(S * A, 0.0);
        std::vector<std::size_t> row_line(S, 0);
        for (const auto &[ln, t] : policy_lines) {
            const auto s = parse_index(t[1], ln, "state");
            const auto a = parse_index(t[2], ln, "action");
            check_state(s, ln);
            check_action(a, ln);
            const double p = parse_real(t[3], ln, "probability");
            if (p < 0.0 || p > 1.0) {
                throw ParseError(ln, "probability outside [0,1]");
            }
            table[s * A + a] += p;
            row_line[s] = ln;
        }
        for (std::size_t s = 0; s < S; ++s) {
            double sum = 0.0;
            for (std::size_t a = 0; a < A; ++a) {
                sum += table[s * A + a];
            }
            if (std::abs(sum - 1.0) > kRowTol) {
                throw ParseError(row_line[s] ? row_line[s] : end_line,
                                 "policy for state " + std::to_string(s) + " does not sum to 1");
            }
        }
        policy.emplace(S, A, std::move(table));
    }
    return {ExplicitMdp(S, A, std::move(rewards), std::move(kernel), std::move(start)),
            std::move(policy)};
}

MdpFile load_explicit_mdp(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open MDP file '" + path + "'");
    }
    return parse_explicit_mdp(in);
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

void write_explicit_mdp(std::ostream &out, const ExplicitMdp &mdp, const Policy *policy) {
    out << "states " << mdp.num_states() << "\n";
    out << "actions " << mdp.num_actions() << "\n";
    out << "rewards";
    for (double r : mdp.rewards()) {
        out << ' ' << fmt(r);
    }
    out << "\n";
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        if (mdp.start()[s] > 0.0) {
            out << "start " << s << ' ' << fmt(mdp.start()[s]) << "\n";
        }
    }
    if (policy != nullptr) {
        for (std::size_t s = 0; s < mdp.num_states(); ++s) {
            for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
                if (const double p = policy->prob(s, a); p > 0.0) {
                    out << "policy " << s << ' ' << a << ' ' << fmt(p) << "\n";
                }
            }
        }
    }
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            for (const Outcome &o : mdp.outcomes(s, a)) {
                out << s << ' ' << a << ' ' << o.next << ' ' << fmt(o.reward) << ' '
                    << fmt(o.prob) << "\n";
            }
        }
    }
}

} // namespace cnc::envs
