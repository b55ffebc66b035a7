#pragma once

#include "cnc/oracle/chain.hpp"

#include <span>
#include <string>

namespace cnc::oracle {

struct SolveOptions {
    std::size_t direct_limit = 10000; // sparse LU up to this many states
    double tolerance = 1e-12;         // L1 residual ||nu P - nu||
    std::size_t max_iterations = 2'000'000;
    bool parallel = true; // OpenMP matrix-vector product in power iteration
};

struct StationaryResult {
    std::vector<double> nu;
    double residual = 0.0;
    ChainProperties properties;
    std::string method; // "direct" or "power"
    std::size_t iterations = 0;
};

// y = x P, given the transpose of P. Each y[j] is one serial sum over the
// incoming edges of j, so both variants give bit-identical results.
void left_multiply_serial(const SparseChain &transpose, std::span<const double> x,
                          std::span<double> y);
void left_multiply_parallel(const SparseChain &transpose, std::span<const double> x,
                            std::span<double> y);

double stationary_residual(const SparseChain &chain, std::span<const double> nu);

// Unique stationary distribution of an irreducible chain. Periodic chains are
// solved too (the lazy chain (I + P)/2 has the same stationary law); the
// property flags record the failure.
StationaryResult solve_stationary(const SparseChain &chain, const SolveOptions &opts = {});

} // namespace cnc::oracle
