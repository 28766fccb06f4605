#pragma once

#include <stdexcept>
#include <string>

namespace parahess {

// Invalid argument to an operation (bad index, shape mismatch, off-grid time).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Point lies outside the domain of a partial function (e.g. f outside the closed cone).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Problem or domain configuration is unusable.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative method failed: iteration cap, step underflow, search exhaustion.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A required precondition on inputs (witness, barrier) does not hold.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace parahess
