#pragma once

#include "cnc/coding/serialize.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace cnc::coding {

using Symbol = std::uint64_t;

// A coding distribution over an alphabet {0, ..., alphabet_size-1}: assigns a
// one-step predictive probability to the next symbol and is updated online.
//
// Models are single writer. prob()/log2_prob() never mutate and may be called
// concurrently with each other, but not with update().
class SequentialModel {
public:
    virtual ~SequentialModel() = default;

    virtual std::string_view kind() const = 0;

    std::uint64_t alphabet_size() const { return alphabet_size_; }
    std::uint64_t history_length() const { return n_; }

    // False for code-length models whose per-symbol scores may sum below one.
    virtual bool normalized() const { return true; }

    double prob(Symbol x) const;
    double log2_prob(Symbol x) const;
    void update(Symbol x);

    // -log2 rho(seq), accumulated predict-then-update. Leaves the model
    // updated on seq.
    double log_loss(std::span<const Symbol> seq);

    virtual std::unique_ptr<SequentialModel> clone() const = 0;

    void save(BinaryWriter &w) const;

protected:
    explicit SequentialModel(std::uint64_t alphabet_size);

    void check_symbol(Symbol x) const;

    virtual double do_prob(Symbol x) const = 0;
    virtual double do_log2_prob(Symbol x) const;
    virtual void do_update(Symbol x) = 0;

    virtual std::uint32_t payload_version() const { return 1; }
    virtual void save_payload(BinaryWriter &w) const = 0;
    virtual void load_payload(BinaryReader &r) = 0;

    friend std::unique_ptr<SequentialModel> load_sequential_model(BinaryReader &r);

    std::uint64_t alphabet_size_;
    std::uint64_t n_ = 0;
};

// Restores any SequentialModel written by SequentialModel::save.
std::unique_ptr<SequentialModel> load_sequential_model(BinaryReader &r);

std::string snapshot(const SequentialModel &model);
std::unique_ptr<SequentialModel> restore_sequential(std::string_view bytes);

// Shape of an environment's factored state view: one alphabet per factor,
// laid out row-major on a grid `grid_width` factors wide.
struct FactorLayout {
    std::vector<std::uint32_t> alphabets;
    std::size_t grid_width = 0;

    std::size_t size() const { return alphabets.size(); }
    std::uint32_t max_alphabet() const;
    bool empty() const { return alphabets.empty(); }
};

// A state as seen by state models: its atomic index and, when the
// environment has one, its factored view.
struct Observation {
    std::uint64_t index = 0;
    std::span<const std::uint8_t> factors;
};

// Owning copy of an Observation.
struct StoredObservation {
    std::uint64_t index = 0;
    std::vector<std::uint8_t> factors;

    Observation view() const { return {index, factors}; }
    void assign(const Observation &o) {
        index = o.index;
        factors.assign(o.factors.begin(), o.factors.end());
    }
};

// rho_S: a coding distribution over whole states.
class StateModel {
public:
    virtual ~StateModel() = default;

    virtual std::string_view kind() const = 0;
    virtual bool normalized() const { return true; }

    virtual double log2_prob(const Observation &s) const = 0;
    virtual void update(const Observation &s) = 0;
    virtual std::uint64_t history_length() const = 0;

    virtual std::unique_ptr<StateModel> clone() const = 0;
    virtual void save(BinaryWriter &w) const = 0;
};

// Restores any StateModel written by StateModel::save.
std::unique_ptr<StateModel> load_state_model(BinaryReader &r);

// Adapts a symbol-level model to atomic state indices.
class AtomicStateModel final : public StateModel {
public:
    explicit AtomicStateModel(std::unique_ptr<SequentialModel> inner);

    std::string_view kind() const override { return "atomic"; }
    bool normalized() const override { return inner_->normalized(); }

    double log2_prob(const Observation &s) const override { return inner_->log2_prob(s.index); }
    void update(const Observation &s) override { inner_->update(s.index); }
    std::uint64_t history_length() const override { return inner_->history_length(); }

    std::unique_ptr<StateModel> clone() const override;
    void save(BinaryWriter &w) const override;

    const SequentialModel &inner() const { return *inner_; }

private:
    std::unique_ptr<SequentialModel> inner_;
};

} // namespace cnc::coding
