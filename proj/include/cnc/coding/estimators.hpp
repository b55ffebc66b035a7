#pragma once

#include "cnc/coding/model.hpp"

#include <cmath>
#include <unordered_map>

namespace cnc::coding {

// Empirical frequency estimator: rho(x | x_{<n}) = count(x) / (n-1).
// With an empty history it predicts uniformly.
class FrequencyModel final : public SequentialModel {
public:
    explicit FrequencyModel(std::uint64_t alphabet_size);

    std::string_view kind() const override { return "frequency"; }
    std::unique_ptr<SequentialModel> clone() const override;

    std::uint64_t count(Symbol x) const;

protected:
    double do_prob(Symbol x) const override;
    void do_update(Symbol x) override;
    void save_payload(BinaryWriter &w) const override;
    void load_payload(BinaryReader &r) override;

private:
    CountTable counts_;
};

// Dirichlet-multinomial predictive (c(x) + alpha) / (n + alpha |X|).
// alpha = 1/2 is the Krichevsky-Trofimov estimator.
class DirichletModel final : public SequentialModel {
public:
    DirichletModel(std::uint64_t alphabet_size, double alpha = 0.5);

    std::string_view kind() const override { return "dirichlet"; }
    std::unique_ptr<SequentialModel> clone() const override;

    double alpha() const { return alpha_; }

protected:
    double do_prob(Symbol x) const override;
    double do_log2_prob(Symbol x) const override;
    void do_update(Symbol x) override;
    void save_payload(BinaryWriter &w) const override;
    void load_payload(BinaryReader &r) override;

private:
    double alpha_;
    CountTable counts_;
};

// Sparse adaptive Dirichlet counts over an arbitrary key type, for alphabets
// too large to enumerate. The alphabet size is carried as log2(N).
//
// Seen keys get c(x)/(n+beta); the escape mass beta/(n+beta) is split evenly
// over the N - m unseen keys, where m is the number of distinct keys seen and
// beta = max(1, m)/2. Once every key has been seen the escape is dropped.
template <typename Key, typename Hash = std::hash<Key>>
class SadCounts {
public:
    // Alphabet given exactly.
    explicit SadCounts(std::uint64_t alphabet_size)
        : log2_alphabet_(std::log2(static_cast<double>(alphabet_size))),
          exact_alphabet_(static_cast<double>(alphabet_size)) {}

    // Alphabet given as log2(N); for N beyond 2^52 only the logarithm is kept.
    static SadCounts with_log2_alphabet(double log2_alphabet) {
        SadCounts out(std::uint64_t{1});
        out.log2_alphabet_ = log2_alphabet;
        out.exact_alphabet_ = log2_alphabet < 52.0 ? std::round(std::exp2(log2_alphabet)) : 0.0;
        return out;
    }

    double log2_alphabet() const { return log2_alphabet_; }
    std::uint64_t total() const { return n_; }
    std::uint64_t distinct() const { return counts_.size(); }

    double escape_mass() const {
        return std::max<double>(1.0, static_cast<double>(counts_.size())) / 2.0;
    }

    double log2_prob(const Key &x) const {
        const double n = static_cast<double>(n_);
        const bool exhausted = unseen_log2() == -INFINITY;
        const double beta = exhausted ? 0.0 : escape_mass();
        auto it = counts_.find(x);
        if (it != counts_.end()) {
            return std::log2(static_cast<double>(it->second)) - std::log2(n + beta);
        }
        if (exhausted) {
            return -INFINITY;
        }
        return std::log2(beta) - std::log2(n + beta) - unseen_log2();
    }

    void update(const Key &x) {
        ++counts_[x];
        ++n_;
    }

    const std::unordered_map<Key, std::uint64_t, Hash> &counts() const { return counts_; }
    void restore(std::unordered_map<Key, std::uint64_t, Hash> counts, std::uint64_t n) {
        counts_ = std::move(counts);
        n_ = n;
    }

private:
    // log2(N - m), or -inf when every key has been seen.
    double unseen_log2() const {
        const double m = static_cast<double>(counts_.size());
        if (exact_alphabet_ > 0.0) {
            const double remaining = exact_alphabet_ - m;
            return remaining <= 0.0 ? -INFINITY : std::log2(remaining);
        }
        return log2_alphabet_ + std::log1p(-m * std::exp2(-log2_alphabet_)) / std::log(2.0);
    }

    double log2_alphabet_;
    double exact_alphabet_;
    std::unordered_map<Key, std::uint64_t, Hash> counts_;
    std::uint64_t n_ = 0;
};

// Sparse Adaptive Dirichlet estimator over symbol indices.
class SadModel final : public SequentialModel {
public:
    explicit SadModel(std::uint64_t alphabet_size);

    std::string_view kind() const override { return "sad"; }
    std::unique_ptr<SequentialModel> clone() const override;

    double escape_mass() const { return counts_.escape_mass(); }
    std::uint64_t distinct() const { return counts_.distinct(); }

protected:
    double do_prob(Symbol x) const override;
    double do_log2_prob(Symbol x) const override;
    void do_update(Symbol x) override;
    void save_payload(BinaryWriter &w) const override;
    void load_payload(BinaryReader &r) override;

private:
    SadCounts<Symbol> counts_;
};

} // namespace cnc::coding
