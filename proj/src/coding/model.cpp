#include "cnc/coding/model.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cnc::coding {

SequentialModel::SequentialModel(std::uint64_t alphabet_size) : alphabet_size_(alphabet_size) {
    if (alphabet_size == 0) {
        throw InputError("alphabet size must be at least 1");
    }
}

void SequentialModel::check_symbol(Symbol x) const {
    if (x >= alphabet_size_) {
        throw InputError("symbol " + std::to_string(x) + " outside alphabet of size " +
                         std::to_string(alphabet_size_));
    }
}

double SequentialModel::prob(Symbol x) const {
    check_symbol(x);
    return do_prob(x);
}

double SequentialModel::log2_prob(Symbol x) const {
    check_symbol(x);
    return do_log2_prob(x);
}

double SequentialModel::do_log2_prob(Symbol x) const { return std::log2(do_prob(x)); }

void SequentialModel::update(Symbol x) {
    check_symbol(x);
    do_update(x);
    ++n_;
}

double SequentialModel::log_loss(std::span<const Symbol> seq) {
    double bits = 0.0;
    for (Symbol x : seq) {
        bits -= log2_prob(x);
        update(x);
    }
    return bits;
}

void SequentialModel::save(BinaryWriter &w) const {
    const auto h = w.begin_record(kind(), payload_version());
    w.u64(alphabet_size_);
    w.u64(n_);
    save_payload(w);
    w.end_record(h);
}

std::string snapshot(const SequentialModel &model) {
    BinaryWriter w;
    model.save(w);
    return wrap_snapshot(w.take());
}

std::unique_ptr<SequentialModel> restore_sequential(std::string_view bytes) {
    auto r = open_snapshot(bytes);
    auto out = load_sequential_model(r);
    r.expect_done();
    return out;
}

std::uint32_t FactorLayout::max_alphabet() const {
    std::uint32_t m = 0;
    for (auto a : alphabets) {
        m = std::max(m, a);
    }
    return m;
}

AtomicStateModel::AtomicStateModel(std::unique_ptr<SequentialModel> inner)
    : inner_(std::move(inner)) {}

std::unique_ptr<StateModel> AtomicStateModel::clone() const {
    return std::make_unique<AtomicStateModel>(inner_->clone());
}

void AtomicStateModel::save(BinaryWriter &w) const {
    const auto h = w.begin_record(kind(), 1);
    inner_->save(w);
    w.end_record(h);
}

} // namespace cnc::coding
