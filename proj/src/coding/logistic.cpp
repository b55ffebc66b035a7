#include "cnc/coding/logistic.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cnc::coding {

LogisticModel::LogisticModel(std::size_t output_alphabet, std::size_t feature_dim,
                             AdagradOptions options)
    : outputs_(output_alphabet), dim_(feature_dim), options_(options),
      weights_(output_alphabet * feature_dim, 0.0), accum_(output_alphabet * feature_dim, 0.0) {
    if (output_alphabet == 0 || feature_dim == 0) {
        throw InputError("logistic model needs outputs and features");
    }
}

void LogisticModel::softmax(std::span<double> scores) const {
    const double mx = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double &s : scores) {
        s = std::exp(s - mx);
        z += s;
    }
    for (double &s : scores) {
        s /= z;
    }
}

void LogisticModel::probabilities(std::span<const double> features, std::span<double> out) const {
    if (features.size() != dim_ || out.size() != outputs_) {
        throw InputError("logistic input has wrong dimensions");
    }
    for (std::size_t k = 0; k < outputs_; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            s += weights_[k * dim_ + j] * features[j];
        }
        out[k] = s;
    }
    softmax(out);
}

double LogisticModel::log_loss(std::span<const double> features, std::size_t observed) const {
    std::vector<double> p(outputs_);
    probabilities(features, p);
    return -std::log(p.at(observed));
}

std::vector<double> LogisticModel::gradient(std::span<const double> features,
                                            std::size_t observed) const {
    if (observed >= outputs_) {
        throw InputError("observed symbol outside logistic alphabet");
    }
    std::vector<double> p(outputs_);
    probabilities(features, p);
    std::vector<double> g(outputs_ * dim_);
    for (std::size_t k = 0; k < outputs_; ++k) {
        const double delta = p[k] - (k == observed ? 1.0 : 0.0);
        for (std::size_t j = 0; j < dim_; ++j) {
            g[k * dim_ + j] = delta * features[j];
        }
    }
    return g;
}

void LogisticModel::update(std::span<const double> features, std::size_t observed) {
    const auto g = gradient(features, observed);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] == 0.0) {
            continue;
        }
        accum_[i] += g[i] * g[i];
        weights_[i] -= options_.learning_rate * g[i] / (std::sqrt(accum_[i]) + options_.epsilon);
    }
}

void LogisticModel::probabilities_sparse(std::span<const std::size_t> active,
                                         std::span<double> out) const {
    if (out.size() > outputs_) {
        throw InputError("logistic output buffer larger than alphabet");
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        double s = 0.0;
        for (auto j : active) {
            s += weights_[k * dim_ + j];
        }
        out[k] = s;
    }
    softmax(out);
}

void LogisticModel::update_sparse(std::span<const std::size_t> active, std::size_t observed,
                                  std::size_t outputs) {
    std::array<double, 256> p_buf{};
    if (outputs > p_buf.size()) {
        throw InputError("sparse logistic update supports at most 256 outputs");
    }
    auto p = std::span(p_buf).first(outputs);
    probabilities_sparse(active, p);
    for (std::size_t k = 0; k < outputs; ++k) {
        const double g = p[k] - (k == observed ? 1.0 : 0.0);
        if (g == 0.0) {
            continue;
        }
        for (auto j : active) {
            const std::size_t i = k * dim_ + j;
            accum_[i] += g * g;
            weights_[i] -= options_.learning_rate * g / (std::sqrt(accum_[i]) + options_.epsilon);
        }
    }
}

void LogisticModel::save(BinaryWriter &w) const {
    const auto h = w.begin_record("logistic-weights", 1);
    w.u64(outputs_);
    w.u64(dim_);
    w.f64(options_.learning_rate);
    w.f64(options_.epsilon);
    for (double v : weights_) {
        w.f64(v);
    }
    for (double v : accum_) {
        w.f64(v);
    }
    w.end_record(h);
}

LogisticModel LogisticModel::load(BinaryReader &outer) {
    auto r = outer.record("logistic-weights");
    const auto outputs = r.u64();
    const auto dim = r.u64();
    AdagradOptions opt;
    opt.learning_rate = r.f64();
    opt.epsilon = r.f64();
    LogisticModel m(outputs, dim, opt);
    for (double &v : m.weights_) {
        v = r.f64();
    }
    for (double &v : m.accum_) {
        v = r.f64();
    }
    r.expect_done();
    return m;
}

LogisticStateModel::LogisticStateModel(FactorLayout layout, std::size_t depth,
                                       AdagradOptions options)
    : FactoredModel(std::move(layout)), depth_(depth), context_alphabet_(layout_.max_alphabet()),
      model_(layout_.max_alphabet(), depth * layout_.max_alphabet() + 1, options) {
    if (depth > kMaxFactorContext) {
        throw InputError("logistic context depth is limited to " + std::to_string(kMaxFactorContext));
    }
}

std::size_t LogisticStateModel::active_features(std::size_t i, const Observation &s,
                                                std::span<std::size_t> out) const {
    std::array<std::uint32_t, kMaxFactorContext> ctx{};
    factor_context(layout_, i, previous_, s.factors, std::span(ctx).first(depth_));
    for (std::size_t d = 0; d < depth_; ++d) {
        out[d] = d * context_alphabet_ + ctx[d];
    }
    out[depth_] = depth_ * context_alphabet_; // bias
    return depth_ + 1;
}

double LogisticStateModel::factor_log2_prob(std::size_t i, const Observation &s) const {
    std::array<std::size_t, kMaxFactorContext + 1> active{};
    const auto n = active_features(i, s, active);
    std::array<double, 256> p{};
    const auto outputs = layout_.alphabets[i];
    model_.probabilities_sparse(std::span(active).first(n), std::span(p).first(outputs));
    return std::log2(p[s.factors[i]]);
}

void LogisticStateModel::update_factors(const Observation &s) {
    std::array<std::size_t, kMaxFactorContext + 1> active{};
    for (std::size_t i = 0; i < layout_.size(); ++i) {
        const auto n = active_features(i, s, active);
        model_.update_sparse(std::span(active).first(n), s.factors[i], layout_.alphabets[i]);
    }
}

std::unique_ptr<StateModel> LogisticStateModel::clone() const {
    return std::make_unique<LogisticStateModel>(*this);
}

void LogisticStateModel::save(BinaryWriter &w) const {
    const auto h = w.begin_record(kind(), 1);
    const auto hb = w.begin_record("layout", 1);
    save_base(w);
    w.end_record(hb);
    w.u64(depth_);
    model_.save(w);
    w.end_record(h);
}

std::unique_ptr<LogisticStateModel> LogisticStateModel::load(BinaryReader &outer) {
    auto r = outer.record("logistic");
    auto base = r.record("layout");
    FactorLayout layout;
    {
        BinaryReader peek = base;
        layout.grid_width = peek.u64();
        layout.alphabets.resize(peek.u64());
        for (auto &a : layout.alphabets) {
            a = peek.u32();
        }
    }
    const auto depth = r.u64();
    auto weights = LogisticModel::load(r);
    r.expect_done();
    auto model = std::make_unique<LogisticStateModel>(layout, depth, weights.options());
    model->load_base(base);
    model->model_ = std::move(weights);
    return model;
}

} // namespace cnc::coding
