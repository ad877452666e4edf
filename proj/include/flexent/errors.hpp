#pragma once

#include <stdexcept>
#include <string>

namespace flexent {

// Error taxonomy mirrored by CLI exit codes:
//   ValidationError (and subclasses) -> 2, InfeasiblePlanError -> 3,
//   NonConvergenceError -> 4.

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UsageError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InfeasiblePlanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& msg, double best_value)
        : std::runtime_error(msg), best_value(best_value) {}
    double best_value;
};

} // namespace flexent
