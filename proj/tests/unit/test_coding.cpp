#include "cnc/coding/ctw.hpp"
#include "cnc/coding/estimators.hpp"
#include "cnc/coding/factored.hpp"
#include "cnc/coding/factory.hpp"
#include "cnc/coding/logistic.hpp"
#include "cnc/coding/lz.hpp"
#include "cnc/error.hpp"
#include "cnc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace cnc;
using namespace cnc::coding;

namespace {

std::vector<std::uint8_t> decode_state(std::uint64_t index, const FactorLayout &layout) {
    std::vector<std::uint8_t> f(layout.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = static_cast<std::uint8_t>(index % layout.alphabets[i]);
        index /= layout.alphabets[i];
    }
    return f;
}

std::uint64_t state_count(const FactorLayout &layout) {
    std::uint64_t n = 1;
    for (auto a : layout.alphabets) {
        n *= a;
    }
    return n;
}

// Sum of 2^log2_prob over every state of a small layout.
double total_mass(const StateModel &m, const FactorLayout &layout) {
    double sum = 0.0;
    for (std::uint64_t i = 0; i < state_count(layout); ++i) {
        const auto f = decode_state(i, layout);
        sum += std::exp2(m.log2_prob({i, f}));
    }
    return sum;
}

double total_mass(const SequentialModel &m) {
    double sum = 0.0;
    for (Symbol x = 0; x < m.alphabet_size(); ++x) {
        sum += m.prob(x);
    }
    return sum;
}

} // namespace

TEST_CASE("frequency model predicts empirical frequencies") {
    FrequencyModel m(2);
    CHECK(m.prob(0) == doctest::Approx(0.5)); // uniform before any data
    m.update(0);
    m.update(0);
    m.update(1);
    CHECK(m.prob(0) == doctest::Approx(2.0 / 3.0));
    CHECK(m.prob(1) == doctest::Approx(1.0 / 3.0));
    CHECK(m.count(0) == 2);
}

TEST_CASE("dirichlet with alpha one half is the KT estimator") {
    DirichletModel m(2, 0.5);
    CHECK(m.prob(0) == doctest::Approx(0.5));
    m.update(0);
    CHECK(m.prob(0) == doctest::Approx(0.75));
    m.update(0);
    CHECK(m.prob(0) == doctest::Approx(5.0 / 6.0));
    DirichletModel kt(2);
    const std::vector<Symbol> seq{0, 1};
    CHECK(kt.log_loss(seq) == doctest::Approx(3.0)); // 1/2 * 1/4
}

TEST_CASE("sad trace on a ten-symbol alphabet") {
    SadModel m(10);
    const std::vector<Symbol> seq{3, 3, 7, 3, 1};
    const std::vector<double> expected{0.1, 2.0 / 3.0, 1.0 / 45.0, 0.5, 1.0 / 40.0};
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(m.prob(seq[i]) == doctest::Approx(expected[i]).epsilon(1e-12));
        CHECK(total_mass(m) == doctest::Approx(1.0).epsilon(1e-12));
        m.update(seq[i]);
    }
}

TEST_CASE("sad puts no mass outside a fully observed alphabet") {
    SadModel m(2);
    m.update(0);
    m.update(1);
    CHECK(m.prob(0) == doctest::Approx(0.5));
    CHECK(m.prob(1) == doctest::Approx(0.5));
}

TEST_CASE("ctw of depth zero reduces to KT") {
    CtwModel m(2, 0);
    for (Symbol x : {0, 1, 0}) {
        m.update(x);
    }
    CHECK(m.prob(0) == doctest::Approx(2.5 / 4.0));
}

TEST_CASE("ctw block probability matches the product of predictions") {
    CtwModel m(3, 3);
    Rng rng(5);
    double log2_sum = 0.0;
    for (int i = 0; i < 300; ++i) {
        const Symbol x = uniform_index(rng, 3);
        log2_sum += m.log2_prob(x);
        m.update(x);
        CHECK(m.tree().max_recursion_error() <= 1e-9);
    }
    CHECK(m.tree().log_block_probability() / std::log(2.0) == doctest::Approx(log2_sum).epsilon(1e-9));
}

TEST_CASE("ctw mixes over context depths on a deterministic alternation") {
    CtwModel m(2, 2);
    for (int i = 0; i < 400; ++i) {
        m.update(static_cast<Symbol>(i % 2));
    }
    // Next symbol is 0 after a 1.
    CHECK(m.prob(0) > 0.95);
}

TEST_CASE("lz78 parse and code length on a binary sequence") {
    const std::vector<Symbol> seq{0, 1, 0, 0, 1, 0, 1, 1, 0, 0, 0, 1};
    const auto phrases = lz_parse(seq);
    REQUIRE(phrases.size() == 7);
    CHECK(phrases[0] == LzPhrase{0, 0, false});
    CHECK(phrases[1] == LzPhrase{0, 1, false});
    CHECK(phrases[2] == LzPhrase{1, 0, false}); // "00"
    CHECK(phrases[3] == LzPhrase{2, 0, false}); // "10"
    CHECK(phrases[4] == LzPhrase{2, 1, false}); // "11"
    CHECK(phrases[5] == LzPhrase{3, 0, false}); // "000"
    CHECK(phrases[6].partial);
    CHECK(lz_reconstruct(phrases) == seq);
    CHECK(lz_code_length(seq, 2) == 24.0);

    // Incremental scores: a phrase costs at its first symbol only.
    LzModel m(2);
    const std::vector<double> bits{2, 3, 3, 0, 4, 0, 4, 0, 4, 0, 0, 4};
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(-m.log2_prob(seq[i]) == bits[i]);
        m.update(seq[i]);
    }
    CHECK(m.coder().code_length() == 24.0);
}

TEST_CASE("lz78 parse of a run") {
    const std::vector<Symbol> seq{0, 0, 0, 0};
    const auto phrases = lz_parse(seq);
    REQUIRE(phrases.size() == 3);
    CHECK(phrases[0] == LzPhrase{0, 0, false});
    CHECK(phrases[1] == LzPhrase{1, 0, false});
    CHECK(phrases[2] == LzPhrase{0, 0, true});
}

TEST_CASE("lz what-if scoring leaves the coder untouched and matches a real append") {
    Rng rng(11);
    LzCoder coder(4);
    for (int i = 0; i < 200; ++i) {
        coder.append(uniform_index(rng, 4));
    }
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Symbol> ext(1 + uniform_index(rng, 20));
        for (auto &x : ext) {
            x = uniform_index(rng, 4);
        }
        const double before = coder.code_length();
        const double what_if = coder.extension_bits(ext);
        CHECK(coder.code_length() == before);
        LzCoder copy = coder;
        copy.append(ext);
        CHECK(copy.code_length() - before == doctest::Approx(what_if));
    }
}

TEST_CASE("lz incremental lengths agree with the batch oracle") {
    Rng rng(3);
    std::vector<Symbol> seq;
    LzCoder coder(5);
    for (int i = 0; i < 500; ++i) {
        seq.push_back(uniform_index(rng, 5));
        coder.append(seq.back());
        if (i % 37 == 0) {
            CHECK(coder.code_length() == lz_code_length(seq, 5));
        }
    }
}

TEST_CASE("normalized sequence models sum to one over fuzzed histories") {
    Rng rng(17);
    for (const char *kind : {"frequency", "dirichlet", "sad", "ctw"}) {
        for (int trial = 0; trial < 50; ++trial) {
            const std::uint64_t alphabet = 1 + uniform_index(rng, 6);
            auto m = make_sequence_model({kind, {}}, alphabet);
            const auto len = uniform_index(rng, 40);
            for (std::uint64_t i = 0; i < len; ++i) {
                m->update(uniform_index(rng, alphabet));
            }
            CAPTURE(kind);
            CHECK(total_mass(*m) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("lz scores lie in (0, 1]") {
    Rng rng(23);
    LzModel m(3);
    for (int i = 0; i < 1000; ++i) {
        const Symbol x = uniform_index(rng, 3);
        const double p = m.prob(x);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
        m.update(x);
    }
}

TEST_CASE("factored state models are normalized over every state of a tiny grid") {
    FactorLayout layout{{2, 3, 2, 2}, 2};
    Rng rng(29);
    const std::vector<ModelSpec> specs{
        {"factored-sad", {{"region_width", 1}, {"region_height", 2}}},
        {"factored-sad", {{"region_width", 2}, {"region_height", 2}}},
        {"factored-ctw", {{"depth", 3}}},
        {"logistic", {{"depth", 3}}},
    };
    for (const auto &spec : specs) {
        auto m = make_state_model(spec, {state_count(layout), layout});
        for (int step = 0; step < 30; ++step) {
            CAPTURE(spec.kind);
            CHECK(total_mass(*m, layout) == doctest::Approx(1.0).epsilon(1e-9));
            const auto i = uniform_index(rng, state_count(layout));
            const auto f = decode_state(i, layout);
            m->update({i, f});
        }
    }
}

TEST_CASE("factored sad regions tile the grid") {
    FactorLayout layout{std::vector<std::uint32_t>(12, 2), 4};
    FactoredSadModel m(layout, 3, 2);
    // 4 wide x 3 high with 3x2 regions: columns {0-2, 3}, rows {0-1, 2}.
    REQUIRE(m.regions().size() == 4);
    std::map<std::size_t, int> seen;
    for (const auto &r : m.regions()) {
        for (auto c : r) {
            ++seen[c];
        }
    }
    CHECK(seen.size() == 12);
    for (const auto &[cell, n] : seen) {
        CHECK(n == 1);
    }
}

TEST_CASE("factor context uses the previous frame and coded neighbours") {
    FactorLayout layout{std::vector<std::uint32_t>(9, 4), 3};
    const std::vector<std::uint8_t> prev{1, 1, 1, 1, 2, 1, 1, 1, 1};
    const std::vector<std::uint8_t> cur{3, 0, 2, 1, 0, 0, 0, 0, 0};
    std::vector<std::uint32_t> ctx(kMaxFactorContext);
    factor_context(layout, 4, prev, cur, ctx);
    // previous same cell, left, up, up-left, up-right
    CHECK(ctx == std::vector<std::uint32_t>{2, 1, 0, 3, 2});
    factor_context(layout, 0, prev, cur, ctx);
    CHECK(ctx == std::vector<std::uint32_t>{1, 0, 0, 0, 0});
}

TEST_CASE("logistic gradient matches central differences") {
    Rng rng(31);
    for (int draw = 0; draw < 20; ++draw) {
        const std::size_t K = 2 + uniform_index(rng, 4);
        const std::size_t D = 1 + uniform_index(rng, 5);
        LogisticModel m(K, D);
        for (auto &w : m.weights()) {
            w = 2.0 * uniform01(rng) - 1.0;
        }
        std::vector<double> f(D);
        for (auto &x : f) {
            x = 2.0 * uniform01(rng) - 1.0;
        }
        const std::size_t y = uniform_index(rng, K);
        const auto g = m.gradient(f, y);
        const double h = 1e-5;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double w0 = m.weights()[i];
            m.weights()[i] = w0 + h;
            const double up = m.log_loss(f, y);
            m.weights()[i] = w0 - h;
            const double down = m.log_loss(f, y);
            m.weights()[i] = w0;
            const double fd = (up - down) / (2 * h);
            CHECK(std::abs(fd - g[i]) <= 1e-4 * std::max(1.0, std::abs(g[i])));
        }
    }
}

TEST_CASE("one adagrad step from zero weights") {
    LogisticModel m(3, 2);
    const std::vector<double> f{1.0, 0.0};
    m.update(f, 0);
    // p = 1/3 each: gradient -2/3 for the observed row, +1/3 for the others.
    CHECK(m.weights()[0] == doctest::Approx(0.1 * (2.0 / 3.0) / (2.0 / 3.0 + 1e-8)).epsilon(1e-12));
    CHECK(m.weights()[2] == doctest::Approx(-0.1 * (1.0 / 3.0) / (1.0 / 3.0 + 1e-8)).epsilon(1e-12));
    CHECK(m.weights()[4] == doctest::Approx(m.weights()[2]));
    CHECK(m.weights()[1] == 0.0); // inactive feature untouched
    CHECK(m.accumulator()[0] == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("sparse logistic path agrees with the dense one") {
    LogisticModel dense(4, 6), sparse(4, 6);
    Rng rng(37);
    for (int i = 0; i < 100; ++i) {
        std::vector<std::size_t> active{uniform_index(rng, 3), 3 + uniform_index(rng, 3)};
        std::vector<double> f(6, 0.0);
        for (auto j : active) {
            f[j] = 1.0;
        }
        const std::size_t y = uniform_index(rng, 4);
        std::vector<double> pd(4), ps(4);
        dense.probabilities(f, pd);
        sparse.probabilities_sparse(active, ps);
        for (int k = 0; k < 4; ++k) {
            CHECK(pd[k] == doctest::Approx(ps[k]).epsilon(1e-12));
        }
        dense.update(f, y);
        sparse.update_sparse(active, y, 4);
    }
}

TEST_CASE("sequence model snapshots round-trip exactly") {
    Rng rng(41);
    for (const char *kind : {"frequency", "dirichlet", "sad", "ctw", "lz"}) {
        auto m = make_sequence_model({kind, {}}, 5);
        for (int i = 0; i < 200; ++i) {
            m->update(uniform_index(rng, 5));
        }
        const auto bytes = snapshot(*m);
        auto back = restore_sequential(bytes);
        CAPTURE(kind);
        CHECK(back->kind() == m->kind());
        CHECK(snapshot(*back) == bytes);
        for (Symbol x = 0; x < 5; ++x) {
            CHECK(back->log2_prob(x) == m->log2_prob(x));
        }
        back->update(2);
        m->update(2);
        CHECK(snapshot(*back) == snapshot(*m));
    }
}

TEST_CASE("state model snapshots round-trip exactly") {
    FactorLayout layout{{3, 3, 3, 3, 3, 3}, 3};
    Rng rng(43);
    const std::vector<ModelSpec> specs{
        {"dirichlet", {}},       {"lz", {}},
        {"factored-sad", {}},    {"factored-ctw", {{"depth", 2}}},
        {"logistic", {{"depth", 2}}},
    };
    for (const auto &spec : specs) {
        auto m = make_state_model(spec, {state_count(layout), layout});
        for (int i = 0; i < 50; ++i) {
            const auto s = uniform_index(rng, state_count(layout));
            const auto f = decode_state(s, layout);
            m->update({s, f});
        }
        const auto bytes = snapshot(*m);
        auto back = restore_state(bytes);
        CAPTURE(spec.kind);
        CHECK(snapshot(*back) == bytes);
        for (int i = 0; i < 10; ++i) {
            const auto s = uniform_index(rng, state_count(layout));
            const auto f = decode_state(s, layout);
            CHECK(back->log2_prob({s, f}) == m->log2_prob({s, f}));
        }
    }
}

TEST_CASE("corrupt snapshots are rejected") {
    auto m = make_sequence_model({"dirichlet", {}}, 4);
    auto bytes = snapshot(*m);
    CHECK_THROWS_AS(restore_sequential(bytes.substr(0, bytes.size() - 3)), FormatError);
    bytes[0] = 'X';
    CHECK_THROWS_AS(restore_sequential(bytes), FormatError);
}

TEST_CASE("out-of-alphabet symbols and bad specs are input errors") {
    DirichletModel m(3);
    CHECK_THROWS_AS(m.prob(3), InputError);
    CHECK_THROWS_AS(m.update(7), InputError);
    CHECK_THROWS_AS(validate_spec({"nope", {}}, true), ConfigError);
    CHECK_THROWS_AS(validate_spec({"dirichlet", {{"depth", 2}}}, false), ConfigError);
    CHECK_THROWS_AS(validate_spec({"factored-sad", {}}, false), ConfigError);
}
