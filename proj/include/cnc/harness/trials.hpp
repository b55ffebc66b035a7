#pragma once

#include <exception>
#include <vector>

namespace cnc::harness {

// Runs fn(trial) for every trial, in parallel when OpenMP is on. Results are
// stored by trial index, so aggregation order never depends on scheduling.
// The first exception (lowest trial index) is rethrown.
template <class Result, class Fn> std::vector<Result> run_trials(std::size_t n, Fn fn) {
    std::vector<Result> out(n);
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

} // namespace cnc::harness
