#pragma once

#include "cnc/coding/model.hpp"

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace cnc::coding {

// Multi-alphabet context tree of fixed depth. Each node keeps a
// Dirichlet(1/2) estimate P_e of the symbols seen in its context and the
// weighted probability
//
//     P_w = 1/2 P_e + 1/2 prod_{children} P_w      (internal nodes)
//     P_w = P_e                                     (depth-D leaves)
//
// Contexts are given most-recent-first; only the first `depth` entries are
// read. Absent children have P_w = 1. Probabilities are kept as natural logs.
class CtwTree {
public:
    CtwTree(std::uint32_t alphabet_size, std::uint32_t context_alphabet, std::size_t depth);

    std::uint32_t alphabet_size() const { return alphabet_; }
    std::uint32_t context_alphabet() const { return context_alphabet_; }
    std::size_t depth() const { return depth_; }
    std::size_t node_count() const { return log_pw_.size(); }

    double prob(std::uint32_t x, std::span<const std::uint32_t> context) const;
    // Full predictive distribution; one pass down the context path.
    void distribution(std::span<const std::uint32_t> context, std::span<double> out) const;
    void update(std::uint32_t x, std::span<const std::uint32_t> context);

    // ln P_w at the root: the log probability of everything seen so far.
    double log_block_probability() const { return log_pw_[0]; }

    // Largest |ln P_w - recursion(ln P_e, children)| over all nodes.
    double max_recursion_error() const;

    void save(BinaryWriter &w) const;
    static CtwTree load(BinaryReader &r);

private:
    static constexpr std::int32_t kNoChild = -1;

    std::int32_t child(std::size_t node, std::uint32_t c) const {
        return children_[node * context_alphabet_ + c];
    }
    std::size_t add_node(std::size_t depth);
    double kt(std::size_t node, std::uint32_t x) const;
    double children_log_pw(std::size_t node) const;
    double weighted(std::size_t node) const;
    void check_context(std::span<const std::uint32_t> context) const;

    std::uint32_t alphabet_;
    std::uint32_t context_alphabet_;
    std::size_t depth_;

    // Node arrays, index 0 is the root.
    std::vector<std::uint32_t> counts_;   // node * alphabet + symbol
    std::vector<std::uint32_t> totals_;
    std::vector<std::int32_t> children_;  // node * context_alphabet + symbol
    std::vector<std::uint16_t> node_depth_;
    std::vector<double> log_pe_;
    std::vector<double> log_pw_;
};

// CTW as a sequence model: the context of each symbol is the preceding
// `depth` symbols of its own history, zero-padded at the start.
class CtwModel final : public SequentialModel {
public:
    CtwModel(std::uint64_t alphabet_size, std::size_t depth);

    std::string_view kind() const override { return "ctw"; }
    std::unique_ptr<SequentialModel> clone() const override;

    const CtwTree &tree() const { return tree_; }

protected:
    double do_prob(Symbol x) const override;
    void do_update(Symbol x) override;
    void save_payload(BinaryWriter &w) const override;
    void load_payload(BinaryReader &r) override;

private:
    CtwTree tree_;
    std::vector<std::uint32_t> context_; // most recent first
};

} // namespace cnc::coding
