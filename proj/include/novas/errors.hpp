#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace novas {

// Argument values outside a function's mathematical domain map to
// std::domain_error and violated preconditions map to std::invalid_argument.
// The types below cover the remaining failure kinds.

/// Data that carries no usable information (zero variance, all-zero history).
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No admissible grid point survived calibration.
class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, double best_objective)
        : std::runtime_error(what), best_objective_(best_objective) {}

    /// Best objective seen among candidates that failed only the beta cap,
    /// or +inf when nothing was evaluated.
    double best_objective() const noexcept { return best_objective_; }

private:
    double best_objective_;
};

/// Invalid combination of experiment or request options.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. line() is 1-based; 0 means the file as a whole.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The predictive-accuracy test statistic is undefined for the given input.
class DegenerateTestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace novas
