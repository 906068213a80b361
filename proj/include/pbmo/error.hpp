#pragma once

#include <stdexcept>
#include <string>

namespace pbmo {

/// Broad failure classes. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind { Validation, CapExceeded, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Malformed input: bad probabilities, index out of range, wrong reward kind...
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorKind::Validation, message) {}
};

/// An enumeration would exceed its configured size cap.
class CapExceededError : public Error {
public:
    explicit CapExceededError(const std::string& message)
        : Error(ErrorKind::CapExceeded, message) {}
};

/// Iterative or LP routines that failed to produce a trustworthy answer.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message)
        : Error(ErrorKind::Numerical, message) {}
};

/// Ordered histories whose count vectors are not linearly independent.
class IndependenceError : public ValidationError {
public:
    explicit IndependenceError(const std::string& message) : ValidationError(message) {}
};

/// Oracle answers that leave no admissible weight vector.
class InconsistencyError : public ValidationError {
public:
    explicit InconsistencyError(const std::string& message) : ValidationError(message) {}
};

/// Exit code contract of the command-line tool.
inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Validation: return 2;
    case ErrorKind::CapExceeded: return 3;
    case ErrorKind::Numerical: return 4;
    }
    return 1;
}

} // namespace pbmo
