#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace efimov {

/// Raised when a dense assembly would exceed the configured matrix dimension.
class DenseCapExceeded : public std::runtime_error {
public:
    DenseCapExceeded(std::size_t dimension, std::size_t cap)
        : std::runtime_error("dense cap exceeded: dimension " + std::to_string(dimension) +
                             " > cap " + std::to_string(cap)),
          dimension_(dimension),
          cap_(cap) {}

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t dimension_;
    std::size_t cap_;
};

/// The iterative eigensolver ran out of basis before every requested pair met tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> best_residuals)
        : std::runtime_error(what), residuals_(std::move(best_residuals)) {}

    const std::vector<double>& best_residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// B - A is not positive semidefinite.
class OrderViolation : public std::runtime_error {
public:
    explicit OrderViolation(double min_eigenvalue)
        : std::runtime_error("A is not <= B: min eigenvalue of B - A is " + std::to_string(min_eigenvalue)),
          min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// A theorem-level precondition (orthonormal family, edge component) does not hold.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace efimov
