#include "cnc/coding/factory.hpp"

#include "cnc/coding/ctw.hpp"
#include "cnc/coding/estimators.hpp"
#include "cnc/coding/factored.hpp"
#include "cnc/coding/logistic.hpp"
#include "cnc/coding/lz.hpp"
#include "cnc/error.hpp"

#include <set>

namespace cnc::coding {

namespace {

const std::map<std::string, std::set<std::string>> &known_params() {
    static const std::map<std::string, std::set<std::string>> table = {
        {"frequency", {}},
        {"dirichlet", {"alpha"}},
        {"sad", {}},
        {"ctw", {"depth"}},
        {"lz", {}},
        {"factored-ctw", {"depth"}},
        {"factored-sad", {"region_width", "region_height"}},
        {"logistic", {"depth", "learning_rate", "epsilon"}},
    };
    return table;
}

bool is_sequence_kind(const std::string &kind) {
    return kind == "frequency" || kind == "dirichlet" || kind == "sad" || kind == "ctw" ||
           kind == "lz";
}

std::size_t count_param(const ModelSpec &spec, const std::string &name, double fallback) {
    const double v = spec.param(name, fallback);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw ConfigError(spec.kind + "." + name + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

} // namespace

double ModelSpec::param(const std::string &name, double fallback) const {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
}

void validate_spec(const ModelSpec &spec, bool state_model) {
    auto it = known_params().find(spec.kind);
    if (it == known_params().end()) {
        throw ConfigError("unknown model kind '" + spec.kind + "'");
    }
    if (!state_model && !is_sequence_kind(spec.kind)) {
        throw ConfigError("model kind '" + spec.kind + "' only models factored states");
    }
    for (const auto &[name, value] : spec.params) {
        if (!it->second.contains(name)) {
            throw ConfigError("unknown hyperparameter '" + name + "' for model '" + spec.kind + "'");
        }
    }
}

std::unique_ptr<SequentialModel> make_sequence_model(const ModelSpec &spec, std::uint64_t alphabet) {
    validate_spec(spec, false);
    if (spec.kind == "frequency") {
        return std::make_unique<FrequencyModel>(alphabet);
    }
    if (spec.kind == "dirichlet") {
        const double alpha = spec.param("alpha", 0.5);
        if (!(alpha > 0)) {
            throw ConfigError("dirichlet.alpha must be positive");
        }
        return std::make_unique<DirichletModel>(alphabet, alpha);
    }
    if (spec.kind == "sad") {
        return std::make_unique<SadModel>(alphabet);
    }
    if (spec.kind == "ctw") {
        return std::make_unique<CtwModel>(alphabet, count_param(spec, "depth", 2));
    }
    return std::make_unique<LzModel>(alphabet);
}

std::unique_ptr<StateModel> make_state_model(const ModelSpec &spec, const StateSpace &space) {
    validate_spec(spec, true);
    if (spec.kind == "lz") {
        if (space.layout.empty()) {
            return std::make_unique<LzStateModel>(space.num_states, false);
        }
        return std::make_unique<LzStateModel>(space.layout.max_alphabet(), true);
    }
    if (is_sequence_kind(spec.kind)) {
        return std::make_unique<AtomicStateModel>(make_sequence_model(spec, space.num_states));
    }
    if (space.layout.empty()) {
        throw ConfigError("model '" + spec.kind + "' needs an environment with a factored view");
    }
    if (spec.kind == "factored-ctw") {
        return std::make_unique<FactoredCtwModel>(space.layout, count_param(spec, "depth", 2));
    }
    if (spec.kind == "factored-sad") {
        return std::make_unique<FactoredSadModel>(
            space.layout, count_param(spec, "region_width", (space.layout.grid_width + 1) / 2),
            count_param(spec, "region_height", space.layout.size() / space.layout.grid_width));
    }
    AdagradOptions opt;
    opt.learning_rate = spec.param("learning_rate", opt.learning_rate);
    opt.epsilon = spec.param("epsilon", opt.epsilon);
    return std::make_unique<LogisticStateModel>(space.layout, count_param(spec, "depth", 2), opt);
}

std::unique_ptr<SequentialModel> load_sequential_model(BinaryReader &outer) {
    const auto tag = outer.peek_tag();
    std::uint32_t version = 0;
    auto r = outer.record(tag, &version);
    const auto alphabet = r.u64();
    const auto n = r.u64();
    std::unique_ptr<SequentialModel> m;
    if (tag == "frequency") {
        m = std::make_unique<FrequencyModel>(alphabet);
    } else if (tag == "dirichlet") {
        m = std::make_unique<DirichletModel>(alphabet);
    } else if (tag == "sad") {
        m = std::make_unique<SadModel>(alphabet);
    } else if (tag == "ctw") {
        m = std::make_unique<CtwModel>(alphabet, 0);
    } else if (tag == "lz") {
        m = std::make_unique<LzModel>(alphabet);
    } else {
        throw FormatError("unknown sequence model record '" + tag + "'");
    }
    if (version != m->payload_version()) {
        throw FormatError("unsupported version of '" + tag + "' record");
    }
    m->n_ = n;
    m->load_payload(r);
    r.expect_done();
    return m;
}

std::unique_ptr<StateModel> load_state_model(BinaryReader &r) {
    const auto tag = r.peek_tag();
    if (tag == "atomic") {
        auto inner = r.record("atomic");
        auto seq = load_sequential_model(inner);
        inner.expect_done();
        return std::make_unique<AtomicStateModel>(std::move(seq));
    }
    if (tag == "lz-state") {
        return LzStateModel::load(r);
    }
    if (tag == "factored-sad") {
        return FactoredSadModel::load(r);
    }
    if (tag == "factored-ctw") {
        return FactoredCtwModel::load(r);
    }
    if (tag == "logistic") {
        return LogisticStateModel::load(r);
    }
    throw FormatError("unknown state model record '" + tag + "'");
}

std::string snapshot(const StateModel &model) {
    BinaryWriter w;
    model.save(w);
    return wrap_snapshot(w.take());
}

std::unique_ptr<StateModel> restore_state(std::string_view bytes) {
    auto r = open_snapshot(bytes);
    auto out = load_state_model(r);
    r.expect_done();
    return out;
}

} // namespace cnc::coding
