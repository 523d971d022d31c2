#pragma once

#include <stdexcept>
#include <string>

namespace deltalap {

// argument outside the mathematical domain of an operation
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// evaluation at a point where the function is infinite
struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

// spectral parameter on the cut (-inf, 0]
struct BranchError : std::domain_error {
    using std::domain_error::domain_error;
};

// spectral parameter too close to the spectrum
struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// spectral parameter hits the eigenvalue
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

struct InsufficientWindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// invalid experiment configuration; the CLI maps this to exit status 2
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace deltalap
