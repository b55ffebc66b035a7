#include "cnc/engine/engine.hpp"
#include "cnc/envs/minipong.hpp"
#include "cnc/envs/trajectory.hpp"
#include "cnc/oracle/random_mdp.hpp"
#include "cnc/oracle/stationary.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace cnc;

namespace {

// A snake chain with roughly 10^5 .. 10^6 windows, built once per horizon.
const oracle::SparseChain &snake_transpose(std::size_t m) {
    static std::map<std::size_t, oracle::SparseChain> cache;
    auto it = cache.find(m);
    if (it == cache.end()) {
        Rng rng(derive_seed(3, "bench", 0));
        const auto r = oracle::random_ergodic_mdp(rng, {6, 6, 3, 3, 2, 2});
        const auto aug = oracle::build_augmented_chain(r.mdp, r.policy);
        it = cache.emplace(m, oracle::build_snake_chain(aug, m).chain.transposed()).first;
    }
    return it->second;
}

template <bool Parallel>
void BM_LeftMultiply(benchmark::State &state) {
    const auto &t = snake_transpose(static_cast<std::size_t>(state.range(0)));
    std::vector<double> x(t.size, 1.0 / static_cast<double>(t.size)), y(t.size);
    for (auto _ : state) {
        if constexpr (Parallel) {
            oracle::left_multiply_parallel(t, x, y);
        } else {
            oracle::left_multiply_serial(t, x, y);
        }
        benchmark::DoNotOptimize(y.data());
    }
    state.counters["windows"] = static_cast<double>(t.size);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.edges()));
}
BENCHMARK(BM_LeftMultiply<false>)->Name("left_multiply/serial")->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_LeftMultiply<true>)->Name("left_multiply/parallel")->Arg(6)->Arg(8)->Arg(10);

// Value query cost as the return alphabet grows: rewards {0, 1} give |Z| = m + 1.
void BM_QValue(benchmark::State &state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    std::vector<std::vector<envs::Outcome>> k(4);
    for (auto &row : k) {
        row = {{0, 0.0, 0.5}, {1, 1.0, 0.5}};
    }
    const envs::ExplicitMdp mdp(2, 2, {0.0, 1.0}, k, {1.0, 0.0});
    Engine e(mdp, {.horizon = m, .state_model = {"ctw", {}}, .return_model = {"dirichlet", {}}});
    envs::run_policy(mdp, envs::Policy(2), 20000, 1,
                     {[&](std::uint64_t, envs::StateIndex s) { e.begin_episode(s); },
                      [&](const envs::TrajectoryStep &t) { e.observe(t.action, t.state, t.reward); }});
    for (auto _ : state) {
        benchmark::DoNotOptimize(e.q_value(0, 1).value);
    }
    state.counters["returns"] = static_cast<double>(e.returns().size());
}
BENCHMARK(BM_QValue)->RangeMultiplier(2)->Range(2, 64);

// One act-observe step of a MiniPong agent.
void BM_MiniPongStep(benchmark::State &state) {
    const envs::MiniPong env;
    const coding::ModelSpec model = state.range(0) == 0 ? coding::ModelSpec{"factored-sad", {}}
                                                        : coding::ModelSpec{"lz", {}};
    Engine e(env, {.horizon = 24, .state_model = model, .return_model = {"sad", {}}});
    Rng rng(5);
    auto s = env.initial_state(rng);
    e.begin_episode(s);
    std::uint64_t t = 0;
    for (auto _ : state) {
        const auto a = e.epsilon_greedy_action(s, t++);
        const auto r = env.step(s, a, rng);
        e.observe(a, r.next, r.reward);
        s = r.next;
    }
    state.SetLabel(model.kind);
}
BENCHMARK(BM_MiniPongStep)->Arg(0)->Arg(1);

} // namespace

BENCHMARK_MAIN();
