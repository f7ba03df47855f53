// Error categories for the drgpb library. The CLI maps these onto exit
// codes: ConfigError -> 2, NumericalError -> 3, IoError -> 4.
#pragma once

#include <stdexcept>
#include <string>

namespace drgpb {

/// Invalid model, schedule, or configuration input.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during filtering or optimization (singular innovation
/// covariance, degenerate evidence, infeasible internal state).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File read/write failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace drgpb
