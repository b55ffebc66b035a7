#include "cnc/engine/window.hpp"

#include "cnc/error.hpp"

#include <algorithm>
#include <cmath>

namespace cnc {

namespace {
constexpr double kTol = 1e-9;
}

ReturnAlphabet::ReturnAlphabet(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw InputError("return alphabet is empty");
    }
    std::sort(values_.begin(), values_.end());
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (values_[i] - values_[i - 1] <= kTol) {
            throw InputError("return alphabet has duplicate values");
        }
    }
}

ReturnAlphabet ReturnAlphabet::for_environment(const envs::Environment &env, std::size_t m) {
    return ReturnAlphabet(env.return_values(m));
}

std::optional<std::size_t> ReturnAlphabet::index_of(double z) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), z - kTol);
    if (it != values_.end() && std::abs(*it - z) <= kTol) {
        return static_cast<std::size_t>(it - values_.begin());
    }
    return std::nullopt;
}

LaggedWindow::LaggedWindow(std::size_t capacity, std::vector<double> rewards)
    : capacity_(capacity), rewards_(std::move(rewards)), ring_(capacity),
      counts_(rewards_.size(), 0) {
    if (capacity == 0) {
        throw InputError("window horizon must be at least 1");
    }
}

void LaggedWindow::push(const Entry &e) {
    if (full()) {
        throw InputError("lagged window is full");
    }
    if (e.reward >= rewards_.size()) {
        throw InputError("reward index out of range");
    }
    ring_[(head_ + size_) % capacity_] = e;
    ++size_;
    ++counts_[e.reward];
}

const LaggedWindow::Entry &LaggedWindow::front() const { return at(0); }

const LaggedWindow::Entry &LaggedWindow::at(std::size_t i) const {
    if (i >= size_) {
        throw InputError("lagged window index out of range");
    }
    return ring_[(head_ + i) % capacity_];
}

LaggedWindow::Entry LaggedWindow::pop() {
    if (empty()) {
        throw InputError("lagged window is empty");
    }
    Entry e = ring_[head_];
    head_ = (head_ + 1) % capacity_;
    --size_;
    --counts_[e.reward];
    return e;
}

void LaggedWindow::clear() {
    head_ = 0;
    size_ = 0;
    std::fill(counts_.begin(), counts_.end(), 0);
}

double LaggedWindow::sum() const {
    double s = 0.0;
    for (std::size_t k = 0; k < rewards_.size(); ++k) {
        s += static_cast<double>(counts_[k]) * rewards_[k];
    }
    return s;
}

} // namespace cnc
