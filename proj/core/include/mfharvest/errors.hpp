#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfharvest {

/// Argument outside the mathematical domain of an operation (y < y0, x <= 0, phi <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative procedure (series, quadrature, bracket expansion) failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bracket expansion exhausted without a sign change.
class NoRootError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// A scale-function or hitting-time integral left the range of double.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Malformed expression or scenario input. `position` is a 0-based character offset
/// into the offending text (npos when not applicable).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position = std::string::npos)
        : std::runtime_error(what), position_(position) {}
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace mfharvest
