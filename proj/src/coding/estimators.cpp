#include "cnc/coding/estimators.hpp"

#include <cmath>

namespace cnc::coding {

FrequencyModel::FrequencyModel(std::uint64_t alphabet_size) : SequentialModel(alphabet_size) {}

std::unique_ptr<SequentialModel> FrequencyModel::clone() const {
    return std::make_unique<FrequencyModel>(*this);
}

std::uint64_t FrequencyModel::count(Symbol x) const {
    auto it = counts_.find(x);
    return it == counts_.end() ? 0 : it->second;
}

double FrequencyModel::do_prob(Symbol x) const {
    if (n_ == 0) {
        return 1.0 / static_cast<double>(alphabet_size_);
    }
    return static_cast<double>(count(x)) / static_cast<double>(n_);
}

void FrequencyModel::do_update(Symbol x) { ++counts_[x]; }

void FrequencyModel::save_payload(BinaryWriter &w) const { write_counts(w, counts_); }
void FrequencyModel::load_payload(BinaryReader &r) { counts_ = read_counts(r); }

DirichletModel::DirichletModel(std::uint64_t alphabet_size, double alpha)
    : SequentialModel(alphabet_size), alpha_(alpha) {}

std::unique_ptr<SequentialModel> DirichletModel::clone() const {
    return std::make_unique<DirichletModel>(*this);
}

double DirichletModel::do_prob(Symbol x) const {
    auto it = counts_.find(x);
    const double c = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
    return (c + alpha_) / (static_cast<double>(n_) + alpha_ * static_cast<double>(alphabet_size_));
}

double DirichletModel::do_log2_prob(Symbol x) const { return std::log2(do_prob(x)); }

void DirichletModel::do_update(Symbol x) { ++counts_[x]; }

void DirichletModel::save_payload(BinaryWriter &w) const {
    w.f64(alpha_);
    write_counts(w, counts_);
}

void DirichletModel::load_payload(BinaryReader &r) {
    alpha_ = r.f64();
    counts_ = read_counts(r);
}

SadModel::SadModel(std::uint64_t alphabet_size)
    : SequentialModel(alphabet_size), counts_(alphabet_size) {}

std::unique_ptr<SequentialModel> SadModel::clone() const { return std::make_unique<SadModel>(*this); }

double SadModel::do_prob(Symbol x) const { return std::exp2(counts_.log2_prob(x)); }
double SadModel::do_log2_prob(Symbol x) const { return counts_.log2_prob(x); }
void SadModel::do_update(Symbol x) { counts_.update(x); }

void SadModel::save_payload(BinaryWriter &w) const {
    CountTable table(counts_.counts().begin(), counts_.counts().end());
    write_counts(w, table);
}

void SadModel::load_payload(BinaryReader &r) {
    auto table = read_counts(r);
    counts_.restore(std::unordered_map<Symbol, std::uint64_t>(table.begin(), table.end()), n_);
}

} // namespace cnc::coding
