#pragma once

#include "cnc/coding/factored.hpp"

#include <span>
#include <vector>

namespace cnc::coding {

struct AdagradOptions {
    double learning_rate = 0.1;
    double epsilon = 1e-8;
};

// Multinomial logistic regression trained online with Adagrad on the log
// loss -ln p(y | f). Weights are a row per output symbol over `feature_dim`
// features. A model can serve factors with smaller alphabets: the softmax
// then runs over the first `outputs` rows only.
class LogisticModel {
public:
    LogisticModel(std::size_t output_alphabet, std::size_t feature_dim, AdagradOptions options = {});

    std::size_t output_alphabet() const { return outputs_; }
    std::size_t feature_dim() const { return dim_; }
    const AdagradOptions &options() const { return options_; }

    void probabilities(std::span<const double> features, std::span<double> out) const;
    double log_loss(std::span<const double> features, std::size_t observed) const;
    // d(-ln p(observed))/dW, row-major like weights().
    std::vector<double> gradient(std::span<const double> features, std::size_t observed) const;
    void update(std::span<const double> features, std::size_t observed);

    // One-hot path: feature j is 1 for each index in `active`, 0 elsewhere.
    // The softmax runs over the first out.size() outputs.
    void probabilities_sparse(std::span<const std::size_t> active, std::span<double> out) const;
    void update_sparse(std::span<const std::size_t> active, std::size_t observed, std::size_t outputs);

    std::vector<double> &weights() { return weights_; }
    const std::vector<double> &weights() const { return weights_; }
    const std::vector<double> &accumulator() const { return accum_; }

    void save(BinaryWriter &w) const;
    static LogisticModel load(BinaryReader &r);

private:
    void softmax(std::span<double> scores) const;

    std::size_t outputs_;
    std::size_t dim_;
    AdagradOptions options_;
    std::vector<double> weights_; // outputs * dim
    std::vector<double> accum_;   // running sum of squared gradients
};

// Autoregressive logistic state model: every factor is predicted from the
// one-hot encoding of its local context plus a bias, with one set of
// weights shared by all factors.
class LogisticStateModel final : public FactoredModel {
public:
    LogisticStateModel(FactorLayout layout, std::size_t depth, AdagradOptions options = {});

    std::string_view kind() const override { return "logistic"; }
    std::size_t factor_count() const override { return layout_.size(); }
    double factor_log2_prob(std::size_t i, const Observation &s) const override;

    std::unique_ptr<StateModel> clone() const override;
    void save(BinaryWriter &w) const override;
    static std::unique_ptr<LogisticStateModel> load(BinaryReader &r);

    const LogisticModel &regression() const { return model_; }

    // Feature indices active for factor i (context one-hots, then the bias).
    std::size_t active_features(std::size_t i, const Observation &s, std::span<std::size_t> out) const;

private:
    void update_factors(const Observation &s) override;

    std::size_t depth_;
    std::size_t context_alphabet_;
    LogisticModel model_;
};

} // namespace cnc::coding
