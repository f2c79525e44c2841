#pragma once

#include <stdexcept>
#include <string>

namespace biot {

/// Invalid user input (configuration, unknown registry names, incompatible data).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pure-Neumann source with nonzero integral rejected in strict mode.
class IncompatibleSourceError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Factorization or linear solve failure.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense realization requested beyond the configured size cap.
class CapExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace biot
