#include "cnc/coding/factored.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cnc::coding {

void factor_context(const FactorLayout &layout, std::size_t factor,
                    std::span<const std::uint8_t> previous, std::span<const std::uint8_t> current,
                    std::span<std::uint32_t> out) {
    const std::size_t w = layout.grid_width == 0 ? layout.size() : layout.grid_width;
    const std::size_t row = factor / w;
    const std::size_t col = factor % w;

    std::array<std::uint32_t, kMaxFactorContext> ctx{};
    ctx[0] = previous.empty() ? 0 : previous[factor];
    if (col > 0) {
        ctx[1] = current[factor - 1];
    }
    if (row > 0) {
        ctx[2] = current[factor - w];
        if (col > 0) {
            ctx[3] = current[factor - w - 1];
        }
        if (col + 1 < w) {
            ctx[4] = current[factor - w + 1];
        }
    }
    for (std::size_t d = 0; d < out.size(); ++d) {
        out[d] = d < ctx.size() ? ctx[d] : 0;
    }
}

FactoredModel::FactoredModel(FactorLayout layout) : layout_(std::move(layout)) {
    if (layout_.empty()) {
        throw InputError("factored model needs a factored state view");
    }
    if (layout_.grid_width == 0) {
        layout_.grid_width = layout_.size();
    }
}

void FactoredModel::check(const Observation &s) const {
    if (s.factors.size() != layout_.size()) {
        throw InputError("observation has " + std::to_string(s.factors.size()) +
                         " factors, model expects " + std::to_string(layout_.size()));
    }
    for (std::size_t i = 0; i < s.factors.size(); ++i) {
        if (s.factors[i] >= layout_.alphabets[i]) {
            throw InputError("factor " + std::to_string(i) + " outside its alphabet");
        }
    }
}

double FactoredModel::log2_prob(const Observation &s) const {
    check(s);
    double sum = 0.0;
    const std::size_t k = factor_count();
    for (std::size_t i = 0; i < k; ++i) {
        sum += factor_log2_prob(i, s);
    }
    return sum;
}

void FactoredModel::update(const Observation &s) {
    check(s);
    update_factors(s);
    previous_.assign(s.factors.begin(), s.factors.end());
    ++n_;
}

void FactoredModel::save_base(BinaryWriter &w) const {
    w.u64(layout_.grid_width);
    w.u64(layout_.size());
    for (auto a : layout_.alphabets) {
        w.u32(a);
    }
    w.u64(n_);
    w.str(std::string_view(reinterpret_cast<const char *>(previous_.data()), previous_.size()));
}

void FactoredModel::load_base(BinaryReader &r) {
    layout_.grid_width = r.u64();
    layout_.alphabets.resize(r.u64());
    for (auto &a : layout_.alphabets) {
        a = r.u32();
    }
    n_ = r.u64();
    const auto prev = r.str();
    previous_.assign(prev.begin(), prev.end());
}

namespace {

FactorLayout read_layout(BinaryReader r) {
    FactorLayout layout;
    layout.grid_width = r.u64();
    layout.alphabets.resize(r.u64());
    for (auto &a : layout.alphabets) {
        a = r.u32();
    }
    return layout;
}

} // namespace

FactoredSadModel::FactoredSadModel(FactorLayout layout, std::size_t region_width,
                                   std::size_t region_height)
    : FactoredModel(std::move(layout)), region_width_(region_width), region_height_(region_height) {
    if (region_width == 0 || region_height == 0) {
        throw InputError("region dimensions must be positive");
    }
    const std::size_t w = layout_.grid_width;
    const std::size_t h = (layout_.size() + w - 1) / w;
    for (std::size_t r0 = 0; r0 < h; r0 += region_height_) {
        for (std::size_t c0 = 0; c0 < w; c0 += region_width_) {
            std::vector<std::size_t> cells;
            double log2_alphabet = 0.0;
            for (std::size_t r = r0; r < std::min(h, r0 + region_height_); ++r) {
                for (std::size_t c = c0; c < std::min(w, c0 + region_width_); ++c) {
                    const std::size_t cell = r * w + c;
                    if (cell < layout_.size()) {
                        cells.push_back(cell);
                        log2_alphabet += std::log2(static_cast<double>(layout_.alphabets[cell]));
                    }
                }
            }
            if (!cells.empty()) {
                regions_.push_back(std::move(cells));
                estimators_.push_back(SadCounts<std::string>::with_log2_alphabet(log2_alphabet));
            }
        }
    }
}

std::string FactoredSadModel::patch(std::size_t region, const Observation &s) const {
    const auto &cells = regions_[region];
    std::string key(cells.size(), '\0');
    for (std::size_t j = 0; j < cells.size(); ++j) {
        key[j] = static_cast<char>(s.factors[cells[j]]);
    }
    return key;
}

double FactoredSadModel::factor_log2_prob(std::size_t i, const Observation &s) const {
    return estimators_[i].log2_prob(patch(i, s));
}

void FactoredSadModel::update_factors(const Observation &s) {
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        estimators_[i].update(patch(i, s));
    }
}

std::unique_ptr<StateModel> FactoredSadModel::clone() const {
    return std::make_unique<FactoredSadModel>(*this);
}

void FactoredSadModel::save(BinaryWriter &w) const {
    const auto h = w.begin_record(kind(), 1);
    const auto hb = w.begin_record("layout", 1);
    save_base(w);
    w.end_record(hb);
    w.u64(region_width_);
    w.u64(region_height_);
    for (const auto &est : estimators_) {
        std::vector<std::pair<std::string, std::uint64_t>> sorted(est.counts().begin(),
                                                                  est.counts().end());
        std::sort(sorted.begin(), sorted.end());
        w.u64(est.total());
        w.u64(sorted.size());
        for (const auto &[k, c] : sorted) {
            w.str(k);
            w.u64(c);
        }
    }
    w.end_record(h);
}

std::unique_ptr<FactoredSadModel> FactoredSadModel::load(BinaryReader &outer) {
    auto r = outer.record("factored-sad");
    auto base = r.record("layout");
    auto layout = read_layout(base);
    const auto rw = r.u64();
    const auto rh = r.u64();
    auto model = std::make_unique<FactoredSadModel>(layout, rw, rh);
    model->load_base(base);
    for (auto &est : model->estimators_) {
        const auto total = r.u64();
        const auto n = r.u64();
        std::unordered_map<std::string, std::uint64_t> counts;
        for (std::uint64_t j = 0; j < n; ++j) {
            auto k = r.str();
            counts[std::move(k)] = r.u64();
        }
        est.restore(std::move(counts), total);
    }
    r.expect_done();
    return model;
}

FactoredCtwModel::FactoredCtwModel(FactorLayout layout, std::size_t depth)
    : FactoredModel(std::move(layout)), depth_(depth) {
    if (depth > kMaxFactorContext) {
        throw InputError("factored ctw depth is limited to " + std::to_string(kMaxFactorContext));
    }
    const auto ctx_alphabet = layout_.max_alphabet();
    trees_.reserve(layout_.size());
    for (auto a : layout_.alphabets) {
        trees_.emplace_back(a, ctx_alphabet, depth_);
    }
}

double FactoredCtwModel::factor_log2_prob(std::size_t i, const Observation &s) const {
    std::array<std::uint32_t, kMaxFactorContext> ctx{};
    factor_context(layout_, i, previous_, s.factors, std::span(ctx).first(depth_));
    return std::log2(trees_[i].prob(s.factors[i], ctx));
}

void FactoredCtwModel::update_factors(const Observation &s) {
    std::array<std::uint32_t, kMaxFactorContext> ctx{};
    for (std::size_t i = 0; i < trees_.size(); ++i) {
        factor_context(layout_, i, previous_, s.factors, std::span(ctx).first(depth_));
        trees_[i].update(s.factors[i], ctx);
    }
}

std::unique_ptr<StateModel> FactoredCtwModel::clone() const {
    return std::make_unique<FactoredCtwModel>(*this);
}

void FactoredCtwModel::save(BinaryWriter &w) const {
    const auto h = w.begin_record(kind(), 1);
    const auto hb = w.begin_record("layout", 1);
    save_base(w);
    w.end_record(hb);
    w.u64(depth_);
    for (const auto &t : trees_) {
        t.save(w);
    }
    w.end_record(h);
}

std::unique_ptr<FactoredCtwModel> FactoredCtwModel::load(BinaryReader &outer) {
    auto r = outer.record("factored-ctw");
    auto base = r.record("layout");
    auto layout = read_layout(base);
    const auto depth = r.u64();
    auto model = std::make_unique<FactoredCtwModel>(layout, depth);
    model->load_base(base);
    for (auto &t : model->trees_) {
        t = CtwTree::load(r);
    }
    r.expect_done();
    return model;
}

} // namespace cnc::coding
