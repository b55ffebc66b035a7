#pragma once

#include "cnc/coding/model.hpp"

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace cnc::coding {

// One LZ78 phrase: the index of its longest proper prefix phrase (0 is the
// empty phrase, k the k-th parsed phrase) followed by one symbol. Only the
// last phrase of a parse may be partial, i.e. a repeat of an existing phrase
// cut short by the end of input.
struct LzPhrase {
    std::uint64_t prefix = 0;
    Symbol symbol = 0;
    bool partial = false;

    bool operator==(const LzPhrase &) const = default;
};

std::vector<LzPhrase> lz_parse(std::span<const Symbol> seq);
std::vector<Symbol> lz_reconstruct(std::span<const LzPhrase> phrases);

// Bits charged for one phrase: ceil(log2(D + 1)) + ceil(log2 |X|) with D the
// dictionary size (empty phrase included) before the phrase is emitted.
double lz_phrase_bits(std::uint64_t dictionary_size, std::uint64_t alphabet_size);

// Code length of a whole sequence under the phrase-cost rule; an open final
// phrase costs the same as if it were closed.
double lz_code_length(std::span<const Symbol> seq, std::uint64_t alphabet_size);

// Incremental LZ78 code-length accounting. The length of the history only
// grows when a new phrase starts, so extending the history by a string costs
// the sum of phrase charges at every phrase start it contains.
class LzCoder {
public:
    explicit LzCoder(std::uint64_t alphabet_size);

    std::uint64_t alphabet_size() const { return alphabet_; }
    std::uint64_t dictionary_size() const { return dictionary_size_; }
    double code_length() const { return committed_bits_; }

    // l(history . xs) - l(history) in bits, without changing the history.
    double extension_bits(std::span<const Symbol> xs) const;

    void append(std::span<const Symbol> xs);
    void append(Symbol x);

    void save(BinaryWriter &w) const;
    static LzCoder load(BinaryReader &r);

private:
    static constexpr std::uint32_t kNone = 0;          // the root is never a child
    static constexpr std::uint64_t kDenseLimit = 64;

    std::uint32_t lookup(std::uint32_t node, Symbol x) const;
    void link(std::uint32_t node, Symbol x, std::uint32_t child);

    std::uint64_t alphabet_;
    bool dense_;
    std::vector<std::uint32_t> dense_children_; // node * alphabet + symbol
    std::unordered_map<std::uint64_t, std::uint32_t> sparse_children_;
    std::uint64_t dictionary_size_ = 1;
    std::uint32_t open_node_ = 0;
    double committed_bits_ = 0.0;
};

// LZ78 as a (non-normalized) sequence model: the score of x is
// 2^-(l(history x) - l(history)).
class LzModel final : public SequentialModel {
public:
    explicit LzModel(std::uint64_t alphabet_size);

    std::string_view kind() const override { return "lz"; }
    bool normalized() const override { return false; }
    std::unique_ptr<SequentialModel> clone() const override;

    const LzCoder &coder() const { return coder_; }

protected:
    double do_prob(Symbol x) const override;
    double do_log2_prob(Symbol x) const override;
    void do_update(Symbol x) override;
    void save_payload(BinaryWriter &w) const override;
    void load_payload(BinaryReader &r) override;

private:
    LzCoder coder_;
};

// LZ78 over whole states: a state is the row-major string of its factors
// (or its atomic index as a single symbol when there is no factored view).
class LzStateModel final : public StateModel {
public:
    // alphabet_size must cover every factor value (or every atomic index).
    LzStateModel(std::uint64_t alphabet_size, bool use_factors);

    std::string_view kind() const override { return "lz-state"; }
    bool normalized() const override { return false; }

    double log2_prob(const Observation &s) const override;
    void update(const Observation &s) override;
    std::uint64_t history_length() const override { return n_; }

    std::unique_ptr<StateModel> clone() const override;
    void save(BinaryWriter &w) const override;
    static std::unique_ptr<LzStateModel> load(BinaryReader &r);

    const LzCoder &coder() const { return coder_; }

private:
    std::vector<Symbol> symbols(const Observation &s) const;

    LzCoder coder_;
    bool use_factors_;
    std::uint64_t n_ = 0;
};

} // namespace cnc::coding
