#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace decaylab {

// Invalid argument outside a function's mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation requested at a pole or non-integrable point (e.g. Y1 at 0).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

// Parameters fall in a regime the method explicitly excludes (e.g. gamma -> 1).
class ExcludedRegimeError : public DomainError {
public:
    using DomainError::DomainError;
};

// Time lies outside the exponential-time window of a window-restricted operation.
class OutOfWindowError : public DomainError {
public:
    using DomainError::DomainError;
};

// Inverting P0 at r = 0 would require an infinite time.
class InfiniteTimeError : public DomainError {
public:
    using DomainError::DomainError;
};

// A root/threshold equation has no solution for the given inputs.
class NoSolutionError : public DomainError {
public:
    using DomainError::DomainError;
};

class InsufficientSamplesError : public DomainError {
public:
    using DomainError::DomainError;
};

// Quadrature failed to reach the requested tolerance; carries the achieved estimate.
class PrecisionError : public std::runtime_error {
public:
    PrecisionError(const std::string& what, std::complex<double> achieved, double error_bound)
        : std::runtime_error(what), achieved_(achieved), error_bound_(error_bound) {}

    std::complex<double> achieved() const { return achieved_; }
    double error_bound() const { return error_bound_; }

private:
    std::complex<double> achieved_;
    double error_bound_;
};

}  // namespace decaylab
