#pragma once

#include <stdexcept>
#include <string>

namespace gog {

/// Invalid arguments or parameters outside a routine's domain.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that started with valid inputs but could not finish
/// (bracket failure, boundary contamination, threshold left the grid, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The nutrient field stopped being nondecreasing in space.
class MonotonicityLost : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Malformed or out-of-range scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gog
