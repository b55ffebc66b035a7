#include "cnc/coding/lz.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace cnc::coding {

namespace {

std::uint64_t ceil_log2(std::uint64_t v) { return v <= 1 ? 0 : std::bit_width(v - 1); }

} // namespace

double lz_phrase_bits(std::uint64_t dictionary_size, std::uint64_t alphabet_size) {
    return static_cast<double>(ceil_log2(dictionary_size + 1) + ceil_log2(alphabet_size));
}

std::vector<LzPhrase> lz_parse(std::span<const Symbol> seq) {
    std::vector<LzPhrase> phrases;
    std::map<std::pair<std::uint64_t, Symbol>, std::uint64_t> dict;
    std::uint64_t node = 0;
    std::uint64_t node_prefix = 0;
    Symbol node_symbol = 0;
    for (Symbol x : seq) {
        auto it = dict.find({node, x});
        if (it != dict.end()) {
            node_prefix = node;
            node_symbol = x;
            node = it->second;
            continue;
        }
        phrases.push_back({node, x, false});
        dict.emplace(std::make_pair(node, x), phrases.size());
        node = 0;
    }
    if (node != 0) {
        phrases.push_back({node_prefix, node_symbol, true});
    }
    return phrases;
}

std::vector<Symbol> lz_reconstruct(std::span<const LzPhrase> phrases) {
    std::vector<std::vector<Symbol>> dict{{}};
    std::vector<Symbol> out;
    for (const auto &p : phrases) {
        if (p.prefix >= dict.size()) {
            throw InputError("lz phrase refers to an unknown prefix");
        }
        auto phrase = dict[p.prefix];
        phrase.push_back(p.symbol);
        out.insert(out.end(), phrase.begin(), phrase.end());
        if (!p.partial) {
            dict.push_back(std::move(phrase));
        }
    }
    return out;
}

double lz_code_length(std::span<const Symbol> seq, std::uint64_t alphabet_size) {
    const auto phrases = lz_parse(seq);
    double bits = 0.0;
    std::uint64_t dict = 1;
    for (const auto &p : phrases) {
        bits += lz_phrase_bits(dict, alphabet_size);
        if (!p.partial) {
            ++dict;
        }
    }
    return bits;
}

LzCoder::LzCoder(std::uint64_t alphabet_size)
    : alphabet_(alphabet_size), dense_(alphabet_size <= kDenseLimit) {
    if (alphabet_size == 0) {
        throw InputError("alphabet size must be at least 1");
    }
    if (dense_) {
        dense_children_.assign(alphabet_, kNone);
    }
}

std::uint32_t LzCoder::lookup(std::uint32_t node, Symbol x) const {
    if (dense_) {
        return dense_children_[static_cast<std::size_t>(node) * alphabet_ + x];
    }
    auto it = sparse_children_.find(static_cast<std::uint64_t>(node) * alphabet_ + x);
    return it == sparse_children_.end() ? kNone : it->second;
}

void LzCoder::link(std::uint32_t node, Symbol x, std::uint32_t child) {
    if (dense_) {
        dense_children_[static_cast<std::size_t>(node) * alphabet_ + x] = child;
        dense_children_.resize(dense_children_.size() + alphabet_, kNone);
    } else {
        sparse_children_[static_cast<std::uint64_t>(node) * alphabet_ + x] = child;
    }
}

double LzCoder::extension_bits(std::span<const Symbol> xs) const {
    // Phrases completed during the what-if walk live in a local overlay; their
    // node ids start past the committed trie so they never collide.
    std::vector<std::pair<std::uint64_t, std::uint32_t>> overlay;
    auto find = [&](std::uint32_t node, Symbol x) -> std::uint32_t {
        if (node < dictionary_size_) {
            const auto committed = lookup(node, x);
            if (committed != kNone) {
                return committed;
            }
        }
        const std::uint64_t key = static_cast<std::uint64_t>(node) * alphabet_ + x;
        for (const auto &[k, child] : overlay) {
            if (k == key) {
                return child;
            }
        }
        return kNone;
    };

    double bits = 0.0;
    std::uint64_t dict = dictionary_size_;
    std::uint32_t node = open_node_;
    for (Symbol x : xs) {
        if (x >= alphabet_) {
            throw InputError("lz symbol outside alphabet");
        }
        if (node == 0) {
            bits += lz_phrase_bits(dict, alphabet_);
        }
        const auto child = find(node, x);
        if (child != kNone) {
            node = child;
            continue;
        }
        overlay.emplace_back(static_cast<std::uint64_t>(node) * alphabet_ + x,
                             static_cast<std::uint32_t>(dict));
        ++dict;
        node = 0;
    }
    return bits;
}

void LzCoder::append(Symbol x) {
    if (x >= alphabet_) {
        throw InputError("lz symbol outside alphabet");
    }
    if (open_node_ == 0) {
        committed_bits_ += lz_phrase_bits(dictionary_size_, alphabet_);
    }
    const auto child = lookup(open_node_, x);
    if (child != kNone) {
        open_node_ = child;
        return;
    }
    if (dictionary_size_ >= std::numeric_limits<std::uint32_t>::max()) {
        throw ResourceError("lz dictionary full", dictionary_size_);
    }
    link(open_node_, x, static_cast<std::uint32_t>(dictionary_size_));
    ++dictionary_size_;
    open_node_ = 0;
}

void LzCoder::append(std::span<const Symbol> xs) {
    for (Symbol x : xs) {
        append(x);
    }
}

void LzCoder::save(BinaryWriter &w) const {
    const auto h = w.begin_record("lz-coder", 1);
    w.u64(alphabet_);
    w.u64(dictionary_size_);
    w.u32(open_node_);
    w.f64(committed_bits_);
    std::vector<std::pair<std::uint64_t, std::uint32_t>> edges;
    if (dense_) {
        for (std::size_t i = 0; i < dense_children_.size(); ++i) {
            if (dense_children_[i] != kNone) {
                edges.emplace_back(i, dense_children_[i]);
            }
        }
    } else {
        edges.assign(sparse_children_.begin(), sparse_children_.end());
        std::sort(edges.begin(), edges.end());
    }
    w.u64(edges.size());
    for (const auto &[k, c] : edges) {
        w.u64(k);
        w.u32(c);
    }
    w.end_record(h);
}

LzCoder LzCoder::load(BinaryReader &outer) {
    auto r = outer.record("lz-coder");
    LzCoder c(r.u64());
    c.dictionary_size_ = r.u64();
    c.open_node_ = r.u32();
    c.committed_bits_ = r.f64();
    if (c.dense_) {
        c.dense_children_.assign(c.dictionary_size_ * c.alphabet_, kNone);
    }
    const auto edges = r.u64();
    for (std::uint64_t i = 0; i < edges; ++i) {
        const auto key = r.u64();
        const auto child = r.u32();
        if (c.dense_) {
            c.dense_children_.at(key) = child;
        } else {
            c.sparse_children_[key] = child;
        }
    }
    r.expect_done();
    return c;
}

LzModel::LzModel(std::uint64_t alphabet_size) : SequentialModel(alphabet_size), coder_(alphabet_size) {}

std::unique_ptr<SequentialModel> LzModel::clone() const { return std::make_unique<LzModel>(*this); }

double LzModel::do_log2_prob(Symbol x) const { return -coder_.extension_bits({&x, 1}); }
double LzModel::do_prob(Symbol x) const { return std::exp2(do_log2_prob(x)); }
void LzModel::do_update(Symbol x) { coder_.append(x); }
void LzModel::save_payload(BinaryWriter &w) const { coder_.save(w); }
void LzModel::load_payload(BinaryReader &r) { coder_ = LzCoder::load(r); }

LzStateModel::LzStateModel(std::uint64_t alphabet_size, bool use_factors)
    : coder_(alphabet_size), use_factors_(use_factors) {}

std::vector<Symbol> LzStateModel::symbols(const Observation &s) const {
    if (!use_factors_) {
        return {s.index};
    }
    return std::vector<Symbol>(s.factors.begin(), s.factors.end());
}

double LzStateModel::log2_prob(const Observation &s) const {
    if (!use_factors_) {
        const Symbol x = s.index;
        return -coder_.extension_bits({&x, 1});
    }
    Symbol buf[512];
    if (s.factors.size() <= std::size(buf)) {
        std::copy(s.factors.begin(), s.factors.end(), buf);
        return -coder_.extension_bits({buf, s.factors.size()});
    }
    return -coder_.extension_bits(symbols(s));
}

void LzStateModel::update(const Observation &s) {
    if (!use_factors_) {
        coder_.append(s.index);
    } else {
        for (auto f : s.factors) {
            coder_.append(static_cast<Symbol>(f));
        }
    }
    ++n_;
}

std::unique_ptr<StateModel> LzStateModel::clone() const {
    return std::make_unique<LzStateModel>(*this);
}

void LzStateModel::save(BinaryWriter &w) const {
    const auto h = w.begin_record(kind(), 1);
    w.u8(use_factors_ ? 1 : 0);
    w.u64(n_);
    coder_.save(w);
    w.end_record(h);
}

std::unique_ptr<LzStateModel> LzStateModel::load(BinaryReader &outer) {
    auto r = outer.record("lz-state");
    const bool use_factors = r.u8() != 0;
    const auto n = r.u64();
    auto coder = LzCoder::load(r);
    r.expect_done();
    auto out = std::make_unique<LzStateModel>(coder.alphabet_size(), use_factors);
    out->coder_ = std::move(coder);
    out->n_ = n;
    return out;
}

} // namespace cnc::coding
