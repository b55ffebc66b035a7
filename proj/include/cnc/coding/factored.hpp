#pragma once

#include "cnc/coding/ctw.hpp"
#include "cnc/coding/estimators.hpp"
#include "cnc/coding/model.hpp"

#include <string>
#include <vector>

namespace cnc::coding {

// Local context of one factor, most relevant first:
//   1. the same factor in the previous state of this model's history,
//   2. its left neighbour, 3. up, 4. up-left, 5. up-right in the current
//      state (row-major predecessors only).
// Missing neighbours and an empty history read as symbol 0. Only the first
// `out.size()` entries are produced.
void factor_context(const FactorLayout &layout, std::size_t factor,
                    std::span<const std::uint8_t> previous, std::span<const std::uint8_t> current,
                    std::span<std::uint32_t> out);

inline constexpr std::size_t kMaxFactorContext = 5;

// A state model that is a product of per-factor conditionals:
//   log rho(s) = sum_i log rho_i(s_i | context_i)
// summed in factor order. Subclasses decide what a factor is.
class FactoredModel : public StateModel {
public:
    double log2_prob(const Observation &s) const final;
    void update(const Observation &s) final;
    std::uint64_t history_length() const final { return n_; }

    const FactorLayout &layout() const { return layout_; }

    virtual std::size_t factor_count() const = 0;
    virtual double factor_log2_prob(std::size_t i, const Observation &s) const = 0;

protected:
    explicit FactoredModel(FactorLayout layout);

    virtual void update_factors(const Observation &s) = 0;
    void check(const Observation &s) const;

    std::span<const std::uint8_t> previous() const { return previous_; }

    void save_base(BinaryWriter &w) const;
    void load_base(BinaryReader &r);

    FactorLayout layout_;
    std::vector<std::uint8_t> previous_;
    std::uint64_t n_ = 0;
};

// Factored Sparse Adaptive Dirichlet: the grid is tiled into rectangular
// regions and each region's patch (the joint content of its cells) is
// modelled by its own SAD estimator over the full patch alphabet.
class FactoredSadModel final : public FactoredModel {
public:
    FactoredSadModel(FactorLayout layout, std::size_t region_width, std::size_t region_height);

    std::string_view kind() const override { return "factored-sad"; }
    std::size_t factor_count() const override { return regions_.size(); }
    double factor_log2_prob(std::size_t i, const Observation &s) const override;

    std::unique_ptr<StateModel> clone() const override;
    void save(BinaryWriter &w) const override;
    static std::unique_ptr<FactoredSadModel> load(BinaryReader &r);

    const std::vector<std::vector<std::size_t>> &regions() const { return regions_; }

private:
    void update_factors(const Observation &s) override;
    std::string patch(std::size_t region, const Observation &s) const;

    std::size_t region_width_;
    std::size_t region_height_;
    std::vector<std::vector<std::size_t>> regions_; // cell indices per region
    std::vector<SadCounts<std::string>> estimators_;
};

// Factored CTW: one context tree per factor, fed the factor's local context.
class FactoredCtwModel final : public FactoredModel {
public:
    FactoredCtwModel(FactorLayout layout, std::size_t depth);

    std::string_view kind() const override { return "factored-ctw"; }
    std::size_t factor_count() const override { return trees_.size(); }
    double factor_log2_prob(std::size_t i, const Observation &s) const override;

    std::unique_ptr<StateModel> clone() const override;
    void save(BinaryWriter &w) const override;
    static std::unique_ptr<FactoredCtwModel> load(BinaryReader &r);

    const CtwTree &tree(std::size_t i) const { return trees_[i]; }
    std::size_t depth() const { return depth_; }

private:
    void update_factors(const Observation &s) override;

    std::size_t depth_;
    std::vector<CtwTree> trees_;
};

} // namespace cnc::coding
