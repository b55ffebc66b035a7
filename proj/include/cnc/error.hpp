#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cnc {

// Bad arguments to a public operation: out-of-alphabet symbols, rewards
// outside the declared set, invalid environment dimensions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed configuration (unknown model key, horizon too short, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Text-format parse failure; carries the 1-based offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A computation would exceed a configured size cap.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string &what, std::size_t bound)
        : std::runtime_error(what + " (computed bound " + std::to_string(bound) + ")"),
          bound_(bound) {}

    std::size_t bound() const noexcept { return bound_; }

private:
    std::size_t bound_;
};

// An iterative solver did not reach its tolerance.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string &what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Snapshot bytes that do not decode under the current format version.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cnc
