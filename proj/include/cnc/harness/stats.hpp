#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace cnc::harness {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) {
        return std::nan("");
    }
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

// Sample standard deviation / sqrt(n); 0 for a single value.
inline double standard_error(std::span<const double> xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    const double n = static_cast<double>(xs.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) {
        return std::nan("");
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

} // namespace cnc::harness
