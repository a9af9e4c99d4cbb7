#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kldiv {

// Argument vectors of different lengths were combined.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A probability vector failed validation (range, normalization, length).
class InvalidDistribution : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A parameter lies outside the domain where the quantity is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// eps at or below (k-1)/n, where the tail bound is not valid.
class OutOfRegionError : public DomainError {
public:
    OutOfRegionError(const std::string& what, double boundary)
        : DomainError(what), boundary_(boundary) {}

    double boundary() const noexcept { return boundary_; }

private:
    double boundary_;
};

// Chain-rule decomposition with p_k = 1.
class DegenerateDistribution : public DomainError {
public:
    using DomainError::DomainError;
};

class EnumerationTooLarge : public std::runtime_error {
public:
    EnumerationTooLarge(const std::string& what, double required_cap)
        : std::runtime_error(what), required_cap_(required_cap) {}

    // Number of atoms the enumeration would produce.
    double required_cap() const noexcept { return required_cap_; }

private:
    double required_cap_;
};

// Iterative solver did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kldiv
