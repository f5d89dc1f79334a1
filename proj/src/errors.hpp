#pragma once

#include <stdexcept>
#include <string>

namespace dissip {

// Argument outside the mathematical domain of a function.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Caller violated a documented precondition (grid too small, lambda too large...).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A structural hypothesis on the potentials failed.
struct AssumptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iteration did not converge, quadrature failed, matrix near singular.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration; pointer is a JSON pointer to the offending value.
struct ConfigError : std::runtime_error {
    ConfigError(std::string ptr, const std::string& msg)
        : std::runtime_error(ptr + ": " + msg), pointer(std::move(ptr)) {}
    std::string pointer;
};

}  // namespace dissip
