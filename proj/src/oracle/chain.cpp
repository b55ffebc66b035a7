#include "cnc/oracle/chain.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace cnc::oracle {

double SparseChain::max_row_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        double sum = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            sum += prob[k];
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

SparseChain SparseChain::transposed() const {
    SparseChain t;
    t.size = size;
    t.row_ptr.assign(size + 1, 0);
    for (auto c : col) {
        ++t.row_ptr[c + 1];
    }
    std::partial_sum(t.row_ptr.begin(), t.row_ptr.end(), t.row_ptr.begin());
    t.col.resize(col.size());
    t.prob.resize(prob.size());
    std::vector<std::size_t> fill(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const std::size_t slot = fill[col[k]]++;
            t.col[slot] = static_cast<std::uint32_t>(i);
            t.prob[slot] = prob[k];
        }
    }
    return t;
}

namespace {

// Iterative Tarjan; returns the component id of every vertex.
std::vector<std::size_t> strongly_connected(const SparseChain &g, std::size_t &count) {
    const std::size_t n = g.size;
    constexpr std::size_t kNone = SIZE_MAX;
    std::vector<std::size_t> index(n, kNone), low(n, 0), comp(n, kNone);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call; // vertex, next edge
    std::size_t next_index = 0;
    count = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kNone) {
            continue;
        }
        call.emplace_back(root, g.row_ptr[root]);
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto &[v, k] = call.back();
            if (k < g.row_ptr[v + 1]) {
                const std::size_t w = g.col[k++];
                if (g.prob[k - 1] <= 0.0) {
                    continue;
                }
                if (index[w] == kNone) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, g.row_ptr[w]);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            call.pop_back();
            if (!call.empty()) {
                low[call.back().first] = std::min(low[call.back().first], low[done]);
            }
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != done);
                ++count;
            }
        }
    }
    return comp;
}

// Vertices of the only closed class when there is exactly one; otherwise
// every vertex. States outside it are transient: they carry no stationary
// mass and only show up because the start distribution reaches them.
std::vector<std::size_t> long_run_vertices(const SparseChain &g) {
    std::size_t count = 0;
    const auto comp = strongly_connected(g, count);
    std::vector<bool> closed(count, true);
    for (std::size_t v = 0; v < g.size; ++v) {
        for (std::size_t k = g.row_ptr[v]; k < g.row_ptr[v + 1]; ++k) {
            if (g.prob[k] > 0.0 && comp[g.col[k]] != comp[v]) {
                closed[comp[v]] = false;
            }
        }
    }
    std::vector<std::size_t> keep;
    if (std::count(closed.begin(), closed.end(), true) != 1) {
        keep.resize(g.size);
        std::iota(keep.begin(), keep.end(), 0);
        return keep;
    }
    const auto c = static_cast<std::size_t>(std::find(closed.begin(), closed.end(), true) - closed.begin());
    for (std::size_t v = 0; v < g.size; ++v) {
        if (comp[v] == c) {
            keep.push_back(v);
        }
    }
    return keep;
}

// Sub-chain on `keep` (ascending), renumbered; `keep` must be closed.
SparseChain restrict_chain(const SparseChain &g, const std::vector<std::size_t> &keep) {
    std::vector<std::uint32_t> id(g.size, UINT32_MAX);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        id[keep[i]] = static_cast<std::uint32_t>(i);
    }
    SparseChain r;
    r.size = keep.size();
    for (auto v : keep) {
        for (std::size_t k = g.row_ptr[v]; k < g.row_ptr[v + 1]; ++k) {
            r.col.push_back(id[g.col[k]]);
            r.prob.push_back(g.prob[k]);
        }
        r.row_ptr.push_back(r.col.size());
    }
    return r;
}

} // namespace

ChainProperties check_properties(const SparseChain &g) {
    ChainProperties p;
    if (g.size == 0) {
        return p;
    }
    std::size_t count = 0;
    const auto comp = strongly_connected(g, count);
    p.components = count;
    p.irreducible = count == 1;
    p.positive_recurrent = p.irreducible; // finite chains

    // A class is closed when no positive edge leaves it.
    std::vector<bool> closed(count, true);
    std::vector<std::size_t> root(count, SIZE_MAX);
    for (std::size_t v = 0; v < g.size; ++v) {
        if (root[comp[v]] == SIZE_MAX) {
            root[comp[v]] = v;
        }
        for (std::size_t k = g.row_ptr[v]; k < g.row_ptr[v + 1]; ++k) {
            if (g.prob[k] > 0.0 && comp[g.col[k]] != comp[v]) {
                closed[comp[v]] = false;
            }
        }
    }
    // Period of a class: gcd of level(u) + 1 - level(v) over its edges,
    // with BFS levels taken inside the class.
    std::vector<std::size_t> level(g.size, SIZE_MAX);
    p.aperiodic = true;
    for (std::size_t c = 0; c < count; ++c) {
        if (!closed[c]) {
            continue;
        }
        std::queue<std::size_t> q;
        q.push(root[c]);
        level[root[c]] = 0;
        std::size_t period = 0;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t k = g.row_ptr[u]; k < g.row_ptr[u + 1]; ++k) {
                const std::size_t v = g.col[k];
                if (g.prob[k] <= 0.0 || comp[v] != c) {
                    continue;
                }
                if (level[v] == SIZE_MAX) {
                    level[v] = level[u] + 1;
                    q.push(v);
                } else {
                    const auto diff = static_cast<long long>(level[u]) + 1 -
                                      static_cast<long long>(level[v]);
                    period = std::gcd(period, static_cast<std::size_t>(std::llabs(diff)));
                }
            }
        }
        // A single vertex without a self-loop has no cycles; it cannot be
        // closed in a stochastic chain, so period is always set here.
        if (period != 1) {
            p.aperiodic = false;
        }
        if (p.irreducible) {
            p.period = period;
        }
    }
    return p;
}

AugmentedChain build_augmented_chain(const envs::ExplicitMdp &mdp, const envs::Policy &policy) {
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    const std::size_t R = mdp.rewards().size();
    if (policy.num_actions() != A || (policy.tabular() && policy.num_states() != S)) {
        throw InputError("policy does not match the MDP");
    }
    AugmentedChain aug;
    aug.num_states = S;
    aug.num_actions = A;
    aug.rewards = mdp.rewards();

    auto key = [&](const Triple &t) { return (t.action * S + t.state) * R + t.reward; };
    std::vector<std::uint32_t> id(S * A * R, UINT32_MAX);
    std::vector<std::size_t> frontier;
    auto visit = [&](const Triple &t) {
        auto &slot = id[key(t)];
        if (slot == UINT32_MAX) {
            slot = static_cast<std::uint32_t>(aug.triples.size());
            aug.triples.push_back(t);
            frontier.push_back(slot);
        }
        return slot;
    };
    // Successor triples of "being in state s", in a fixed order.
    auto successors = [&](std::size_t s, auto &&emit) {
        for (std::size_t a = 0; a < A; ++a) {
            const double pa = policy.prob(s, a);
            if (pa <= 0.0) {
                continue;
            }
            std::map<std::pair<std::size_t, std::size_t>, double> merged;
            for (const auto &o : mdp.outcomes(s, a)) {
                if (o.prob > 0.0) {
                    merged[{o.next, mdp.reward_index(o.reward)}] += o.prob;
                }
            }
            for (const auto &[sr, p] : merged) {
                emit(Triple{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(sr.first),
                            static_cast<std::uint32_t>(sr.second)},
                     pa * p);
            }
        }
    };
    for (std::size_t s = 0; s < S; ++s) {
        if (mdp.start()[s] > 0.0) {
            successors(s, [&](const Triple &t, double) { visit(t); });
        }
    }
    if (aug.triples.empty()) {
        throw InputError("no triple is reachable from the start distribution");
    }
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
    for (std::size_t i = 0; i < aug.triples.size(); ++i) {
        rows.emplace_back();
        successors(aug.triples[i].state,
                   [&](const Triple &t, double p) { rows[i].emplace_back(visit(t), p); });
    }
    auto &c = aug.chain;
    c.size = aug.triples.size();
    for (const auto &row : rows) {
        for (const auto &[j, p] : row) {
            c.col.push_back(j);
            c.prob.push_back(p);
        }
        c.row_ptr.push_back(c.col.size());
    }
    const auto keep = long_run_vertices(c);
    if (keep.size() < c.size) {
        c = restrict_chain(c, keep);
        std::vector<Triple> kept;
        for (auto v : keep) {
            kept.push_back(aug.triples[v]);
        }
        aug.triples = std::move(kept);
    }
    return aug;
}

SparseChain build_action_state_chain(const envs::ExplicitMdp &mdp, const envs::Policy &policy) {
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    // Pairs (a, s) reachable from the start distribution, in discovery order.
    std::vector<std::uint32_t> id(S * A, UINT32_MAX);
    std::vector<std::size_t> pairs;
    auto visit = [&](std::size_t a, std::size_t s) {
        auto &slot = id[a * S + s];
        if (slot == UINT32_MAX) {
            slot = static_cast<std::uint32_t>(pairs.size());
            pairs.push_back(a * S + s);
        }
        return slot;
    };
    auto successors = [&](std::size_t s, auto &&emit) {
        std::map<std::size_t, double> row;
        for (std::size_t a = 0; a < A; ++a) {
            const double pa = policy.prob(s, a);
            if (pa <= 0.0) {
                continue;
            }
            for (const auto &o : mdp.outcomes(s, a)) {
                if (o.prob > 0.0) {
                    row[a * S + o.next] += pa * o.prob;
                }
            }
        }
        for (const auto &[as, p] : row) {
            emit(as / S, as % S, p);
        }
    };
    for (std::size_t s = 0; s < S; ++s) {
        if (mdp.start()[s] > 0.0) {
            successors(s, [&](std::size_t a, std::size_t s2, double) { visit(a, s2); });
        }
    }
    SparseChain c;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        successors(pairs[i] % S, [&](std::size_t a, std::size_t s2, double p) {
            c.col.push_back(visit(a, s2));
            c.prob.push_back(p);
        });
        c.row_ptr.push_back(c.col.size());
    }
    c.size = pairs.size();
    const auto keep = long_run_vertices(c);
    return keep.size() < c.size ? restrict_chain(c, keep) : c;
}

SnakeChain build_snake_chain(const AugmentedChain &aug, std::size_t m, std::size_t cap) {
    if (m == 0) {
        throw InputError("snake chain horizon must be at least 1");
    }
    const auto &g = aug.chain;
    SnakeChain snake;
    snake.horizon = m;
    const std::size_t width = m + 1;

    // Number of windows starting at each triple (double: no overflow).
    std::vector<double> paths(g.size, 1.0), deeper(g.size);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t y = 0; y < g.size; ++y) {
            double total = 0.0;
            for (std::size_t e = g.row_ptr[y]; e < g.row_ptr[y + 1]; ++e) {
                if (g.prob[e] > 0.0) {
                    total += paths[g.col[e]];
                }
            }
            deeper[y] = total;
        }
        paths.swap(deeper);
    }
    const double bound = std::accumulate(paths.begin(), paths.end(), 0.0);
    if (bound > static_cast<double>(cap)) {
        const auto reported = bound >= 1.8e19 ? SIZE_MAX : static_cast<std::size_t>(bound);
        throw ResourceError("snake chain exceeds " + std::to_string(cap) + " windows", reported);
    }
    snake.windows.reserve(static_cast<std::size_t>(bound) * width);

    // Enumerate windows depth-first from every start triple.
    std::vector<std::uint32_t> path(width);
    std::size_t count = 0;
    std::vector<std::size_t> edge(width);
    for (std::uint32_t y0 = 0; y0 < g.size; ++y0) {
        path[0] = y0;
        std::size_t depth = 0;
        edge[0] = g.row_ptr[y0];
        while (true) {
            if (depth + 1 == width) {
                ++count;
                snake.windows.insert(snake.windows.end(), path.begin(), path.end());
                if (depth == 0) {
                    break;
                }
                --depth;
                continue;
            }
            const std::uint32_t u = path[depth];
            bool advanced = false;
            while (edge[depth] < g.row_ptr[u + 1]) {
                const std::size_t k = edge[depth]++;
                if (g.prob[k] > 0.0) {
                    path[depth + 1] = g.col[k];
                    ++depth;
                    if (depth + 1 < width) {
                        edge[depth] = g.row_ptr[path[depth]];
                    }
                    advanced = true;
                    break;
                }
            }
            if (!advanced) {
                if (depth == 0) {
                    break;
                }
                --depth;
            }
        }
    }

    // Window lookup by content.
    struct Hash {
        std::size_t operator()(const std::vector<std::uint32_t> &v) const {
            std::size_t h = 1469598103934665603ULL;
            for (auto x : v) {
                h = (h ^ x) * 1099511628211ULL;
            }
            return h;
        }
    };
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, Hash> index;
    index.reserve(count * 2);
    for (std::size_t w = 0; w < count; ++w) {
        index.emplace(std::vector<std::uint32_t>(snake.window(w), snake.window(w) + width),
                      static_cast<std::uint32_t>(w));
    }
    auto &c = snake.chain;
    c.size = count;
    c.row_ptr.reserve(count + 1);
    std::vector<std::uint32_t> next(width);
    for (std::size_t w = 0; w < count; ++w) {
        const std::uint32_t *win = snake.window(w);
        std::copy(win + 1, win + width, next.begin());
        const std::uint32_t last = win[m];
        for (std::size_t k = g.row_ptr[last]; k < g.row_ptr[last + 1]; ++k) {
            if (g.prob[k] <= 0.0) {
                continue;
            }
            next[m] = g.col[k];
            c.col.push_back(index.at(next));
            c.prob.push_back(g.prob[k]);
        }
        c.row_ptr.push_back(c.col.size());
    }
    return snake;
}

} // namespace cnc::oracle
