#pragma once

#include <stdexcept>
#include <string>

namespace acop {

/// Argument outside the mathematical domain of an operation (y <= 0 for an
/// IG density, q outside (0,1) for a quantile, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or insufficient input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or command-line request.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (non-convergence, non-finite intermediate).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace acop
