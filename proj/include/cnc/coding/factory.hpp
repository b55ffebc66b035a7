#pragma once

#include "cnc/coding/model.hpp"

#include <map>
#include <memory>
#include <string>

namespace cnc::coding {

// A model choice as written in experiment configs: a kind key
// ("frequency" | "dirichlet" | "sad" | "ctw" | "factored-ctw" |
//  "factored-sad" | "lz" | "logistic") plus numeric hyperparameters.
struct ModelSpec {
    std::string kind;
    std::map<std::string, double> params;

    double param(const std::string &name, double fallback) const;
};

// The state space a state model must cover.
struct StateSpace {
    std::uint64_t num_states = 0;
    FactorLayout layout;
};

// Symbol-level models; used for rho_Z and for the atomic rho_S variants.
std::unique_ptr<SequentialModel> make_sequence_model(const ModelSpec &spec, std::uint64_t alphabet);

// State models. Symbol-level kinds are applied to atomic state indices,
// "lz" encodes the factored view when there is one.
std::unique_ptr<StateModel> make_state_model(const ModelSpec &spec, const StateSpace &space);

// Throws ConfigError for unknown kinds or hyperparameters.
void validate_spec(const ModelSpec &spec, bool state_model);

std::string snapshot(const StateModel &model);
std::unique_ptr<StateModel> restore_state(std::string_view bytes);

} // namespace cnc::coding
