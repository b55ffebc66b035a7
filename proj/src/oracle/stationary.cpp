#include "cnc/oracle/stationary.hpp"

#include "cnc/error.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>

namespace cnc::oracle {

void left_multiply_serial(const SparseChain &t, std::span<const double> x, std::span<double> y) {
    for (std::size_t j = 0; j < t.size; ++j) {
        double acc = 0.0;
        for (std::size_t k = t.row_ptr[j]; k < t.row_ptr[j + 1]; ++k) {
            acc += x[t.col[k]] * t.prob[k];
        }
        y[j] = acc;
    }
}

void left_multiply_parallel(const SparseChain &t, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<std::ptrdiff_t>(t.size);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = t.row_ptr[j]; k < t.row_ptr[j + 1]; ++k) {
            acc += x[t.col[k]] * t.prob[k];
        }
        y[j] = acc;
    }
}

double stationary_residual(const SparseChain &chain, std::span<const double> nu) {
    std::vector<double> y(chain.size, 0.0);
    for (std::size_t i = 0; i < chain.size; ++i) {
        for (std::size_t k = chain.row_ptr[i]; k < chain.row_ptr[i + 1]; ++k) {
            y[chain.col[k]] += nu[i] * chain.prob[k];
        }
    }
    double r = 0.0;
    for (std::size_t i = 0; i < chain.size; ++i) {
        r += std::abs(y[i] - nu[i]);
    }
    return r;
}

namespace {

void normalize(std::vector<double> &v) {
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    for (double &x : v) {
        x /= sum;
    }
}

bool solve_direct(const SparseChain &chain, std::vector<double> &nu) {
    // nu (P - I) = 0 with the last equation replaced by sum(nu) = 1:
    // solve (P - I)^T nu^T = e_n after swapping in a row of ones.
    const auto n = static_cast<Eigen::Index>(chain.size);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(chain.edges() + 2 * chain.size);
    for (std::size_t i = 0; i < chain.size; ++i) {
        for (std::size_t k = chain.row_ptr[i]; k < chain.row_ptr[i + 1]; ++k) {
            if (static_cast<Eigen::Index>(chain.col[k]) != n - 1) {
                entries.emplace_back(chain.col[k], static_cast<Eigen::Index>(i), chain.prob[k]);
            }
        }
        if (static_cast<Eigen::Index>(i) != n - 1) {
            entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), -1.0);
        }
        entries.emplace_back(n - 1, static_cast<Eigen::Index>(i), 1.0);
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        return false;
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b[n - 1] = 1.0;
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite()) {
        return false;
    }
    nu.assign(x.data(), x.data() + n);
    for (double &v : nu) {
        v = std::max(v, 0.0);
    }
    normalize(nu);
    return true;
}

} // namespace

StationaryResult solve_stationary(const SparseChain &chain, const SolveOptions &opts) {
    if (chain.size == 0) {
        throw InputError("cannot solve an empty chain");
    }
    StationaryResult res;
    res.properties = check_properties(chain);

    std::vector<double> nu;
    bool have = false;
    if (chain.size <= opts.direct_limit) {
        have = solve_direct(chain, nu);
        if (have) {
            res.method = "direct";
            res.residual = stationary_residual(chain, nu);
        }
    }
    if (!have || res.residual > opts.tolerance) {
        // Lazy power iteration, warm-started from the direct solution if any.
        const SparseChain t = chain.transposed();
        if (!have) {
            nu.assign(chain.size, 1.0 / static_cast<double>(chain.size));
        }
        std::vector<double> next(chain.size);
        res.method = have ? "direct+power" : "power";
        std::size_t it = 0;
        for (; it < opts.max_iterations; ++it) {
            if (opts.parallel) {
                left_multiply_parallel(t, nu, next);
            } else {
                left_multiply_serial(t, nu, next);
            }
            double diff = 0.0;
            for (std::size_t i = 0; i < chain.size; ++i) {
                diff += std::abs(next[i] - nu[i]);
                next[i] = 0.5 * (next[i] + nu[i]);
            }
            nu.swap(next);
            normalize(nu);
            // diff is the residual of the iterate before this step.
            if (diff <= opts.tolerance) {
                break;
            }
        }
        res.iterations = it;
        res.residual = stationary_residual(chain, nu);
        if (res.residual > opts.tolerance) {
            throw NumericError("stationary solve did not converge", res.residual);
        }
    }
    res.nu = std::move(nu);
    return res;
}

} // namespace cnc::oracle
