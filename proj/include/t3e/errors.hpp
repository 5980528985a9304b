#pragma once

#include <stdexcept>
#include <string>

namespace t3e {

/// Invalid numeric input to an operation (empty radicand, p out of range, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownConstant : std::runtime_error {
    explicit UnknownConstant(const std::string& name)
        : std::runtime_error("unknown constant: " + name) {}
};

struct MissingDelta : std::runtime_error {
    explicit MissingDelta(const std::string& name)
        : std::runtime_error("constant " + name + " requires a delta argument") {}
};

struct DeltaOutOfDomain : DomainError {
    using DomainError::DomainError;
};

/// The absorption step needs C_flat * C_lap_cmp(delta) < 1; thrown when the
/// interval evaluation cannot certify that.
struct AbsorptionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotMeanZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(int iters, double residual)
        : std::runtime_error("iteration failed to converge after " + std::to_string(iters) +
                             " steps (relative residual " + std::to_string(residual) + ")") {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace t3e
