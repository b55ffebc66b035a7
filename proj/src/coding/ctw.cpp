#include "cnc/coding/ctw.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cnc::coding {

namespace {

const double kLogHalf = std::log(0.5);

double log_add(double a, double b) {
    if (a < b) {
        std::swap(a, b);
    }
    return a + std::log1p(std::exp(b - a));
}

} // namespace

CtwTree::CtwTree(std::uint32_t alphabet_size, std::uint32_t context_alphabet, std::size_t depth)
    : alphabet_(alphabet_size), context_alphabet_(context_alphabet), depth_(depth) {
    if (alphabet_size == 0 || context_alphabet == 0) {
        throw InputError("ctw alphabets must be non-empty");
    }
    if (depth > std::numeric_limits<std::uint16_t>::max()) {
        throw InputError("ctw depth too large");
    }
    add_node(0);
}

std::size_t CtwTree::add_node(std::size_t depth) {
    const std::size_t id = log_pw_.size();
    counts_.resize(counts_.size() + alphabet_, 0);
    totals_.push_back(0);
    children_.resize(children_.size() + context_alphabet_, kNoChild);
    node_depth_.push_back(static_cast<std::uint16_t>(depth));
    log_pe_.push_back(0.0);
    log_pw_.push_back(0.0);
    return id;
}

double CtwTree::kt(std::size_t node, std::uint32_t x) const {
    return (counts_[node * alphabet_ + x] + 0.5) /
           (totals_[node] + 0.5 * static_cast<double>(alphabet_));
}

double CtwTree::children_log_pw(std::size_t node) const {
    double sum = 0.0;
    for (std::uint32_t c = 0; c < context_alphabet_; ++c) {
        const auto ch = child(node, c);
        if (ch != kNoChild) {
            sum += log_pw_[static_cast<std::size_t>(ch)];
        }
    }
    return sum;
}

double CtwTree::weighted(std::size_t node) const {
    if (node_depth_[node] == depth_) {
        return log_pe_[node];
    }
    return log_add(kLogHalf + log_pe_[node], kLogHalf + children_log_pw(node));
}

void CtwTree::check_context(std::span<const std::uint32_t> context) const {
    if (context.size() < depth_) {
        throw InputError("ctw context shorter than tree depth");
    }
    for (std::size_t d = 0; d < depth_; ++d) {
        if (context[d] >= context_alphabet_) {
            throw InputError("ctw context symbol outside context alphabet");
        }
    }
}

double CtwTree::prob(std::uint32_t x, std::span<const std::uint32_t> context) const {
    if (x >= alphabet_) {
        throw InputError("ctw symbol outside alphabet");
    }
    check_context(context);

    // Existing prefix of the context path.
    constexpr std::size_t kInlineDepth = 32;
    std::array<std::size_t, kInlineDepth + 1> inline_path;
    std::vector<std::size_t> heap_path;
    std::size_t *path = inline_path.data();
    if (depth_ > kInlineDepth) {
        heap_path.resize(depth_ + 1);
        path = heap_path.data();
    }
    std::size_t len = 0;
    std::size_t node = 0;
    path[len++] = node;
    while (len <= depth_) {
        const auto ch = child(node, context[len - 1]);
        if (ch == kNoChild) {
            break;
        }
        node = static_cast<std::size_t>(ch);
        path[len++] = node;
    }

    // Below the existing path every subtree is fresh and predicts uniformly.
    double p = 1.0 / static_cast<double>(alphabet_);
    std::size_t i = len;
    if (len == depth_ + 1) {
        p = kt(path[depth_], x);
        i = depth_;
    }
    while (i-- > 0) {
        const std::size_t n = path[i];
        const double a = kLogHalf + log_pe_[n];
        const double b = kLogHalf + children_log_pw(n);
        const double lw = log_pw_[n];
        p = std::exp(a - lw) * kt(n, x) + std::exp(b - lw) * p;
    }
    return p;
}

void CtwTree::distribution(std::span<const std::uint32_t> context, std::span<double> out) const {
    if (out.size() != alphabet_) {
        throw InputError("ctw distribution buffer has wrong size");
    }
    for (std::uint32_t x = 0; x < alphabet_; ++x) {
        out[x] = prob(x, context);
    }
}

void CtwTree::update(std::uint32_t x, std::span<const std::uint32_t> context) {
    if (x >= alphabet_) {
        throw InputError("ctw symbol outside alphabet");
    }
    check_context(context);

    std::vector<std::size_t> path;
    path.reserve(depth_ + 1);
    std::size_t node = 0;
    path.push_back(node);
    for (std::size_t d = 0; d < depth_; ++d) {
        auto ch = child(node, context[d]);
        if (ch == kNoChild) {
            const auto fresh = add_node(d + 1);
            children_[node * context_alphabet_ + context[d]] = static_cast<std::int32_t>(fresh);
            ch = static_cast<std::int32_t>(fresh);
        }
        node = static_cast<std::size_t>(ch);
        path.push_back(node);
    }

    for (std::size_t i = path.size(); i-- > 0;) {
        const std::size_t n = path[i];
        log_pe_[n] += std::log(kt(n, x));
        ++counts_[n * alphabet_ + x];
        ++totals_[n];
        log_pw_[n] = weighted(n);
    }
}

double CtwTree::max_recursion_error() const {
    double worst = 0.0;
    for (std::size_t n = 0; n < log_pw_.size(); ++n) {
        worst = std::max(worst, std::abs(log_pw_[n] - weighted(n)));
    }
    return worst;
}

void CtwTree::save(BinaryWriter &w) const {
    const auto h = w.begin_record("ctw-tree", 1);
    w.u32(alphabet_);
    w.u32(context_alphabet_);
    w.u64(depth_);
    w.u64(node_count());
    for (std::size_t n = 0; n < node_count(); ++n) {
        w.u32(node_depth_[n]);
        w.u32(totals_[n]);
        w.f64(log_pe_[n]);
        w.f64(log_pw_[n]);
        for (std::uint32_t x = 0; x < alphabet_; ++x) {
            w.u32(counts_[n * alphabet_ + x]);
        }
        for (std::uint32_t c = 0; c < context_alphabet_; ++c) {
            w.u32(static_cast<std::uint32_t>(children_[n * context_alphabet_ + c]));
        }
    }
    w.end_record(h);
}

CtwTree CtwTree::load(BinaryReader &outer) {
    auto r = outer.record("ctw-tree");
    const auto alphabet = r.u32();
    const auto context_alphabet = r.u32();
    const auto depth = r.u64();
    CtwTree tree(alphabet, context_alphabet, depth);
    const auto nodes = r.u64();
    tree.counts_.assign(nodes * alphabet, 0);
    tree.totals_.assign(nodes, 0);
    tree.children_.assign(nodes * context_alphabet, kNoChild);
    tree.node_depth_.assign(nodes, 0);
    tree.log_pe_.assign(nodes, 0.0);
    tree.log_pw_.assign(nodes, 0.0);
    for (std::size_t n = 0; n < nodes; ++n) {
        tree.node_depth_[n] = static_cast<std::uint16_t>(r.u32());
        tree.totals_[n] = r.u32();
        tree.log_pe_[n] = r.f64();
        tree.log_pw_[n] = r.f64();
        for (std::uint32_t x = 0; x < alphabet; ++x) {
            tree.counts_[n * alphabet + x] = r.u32();
        }
        for (std::uint32_t c = 0; c < context_alphabet; ++c) {
            tree.children_[n * context_alphabet + c] = static_cast<std::int32_t>(r.u32());
        }
    }
    r.expect_done();
    return tree;
}

CtwModel::CtwModel(std::uint64_t alphabet_size, std::size_t depth)
    : SequentialModel(alphabet_size),
      tree_(static_cast<std::uint32_t>(alphabet_size), static_cast<std::uint32_t>(alphabet_size),
            depth),
      context_(depth, 0) {
    if (alphabet_size > std::numeric_limits<std::uint32_t>::max()) {
        throw InputError("ctw alphabet too large");
    }
}

std::unique_ptr<SequentialModel> CtwModel::clone() const { return std::make_unique<CtwModel>(*this); }

double CtwModel::do_prob(Symbol x) const {
    return tree_.prob(static_cast<std::uint32_t>(x), context_);
}

void CtwModel::do_update(Symbol x) {
    tree_.update(static_cast<std::uint32_t>(x), context_);
    if (!context_.empty()) {
        std::rotate(context_.rbegin(), context_.rbegin() + 1, context_.rend());
        context_[0] = static_cast<std::uint32_t>(x);
    }
}

void CtwModel::save_payload(BinaryWriter &w) const {
    tree_.save(w);
    w.u64(context_.size());
    for (auto c : context_) {
        w.u32(c);
    }
}

void CtwModel::load_payload(BinaryReader &r) {
    tree_ = CtwTree::load(r);
    context_.resize(r.u64());
    for (auto &c : context_) {
        c = r.u32();
    }
}

} // namespace cnc::coding
