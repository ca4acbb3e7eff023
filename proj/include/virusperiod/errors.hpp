#pragma once

#include <stdexcept>
#include <string>

namespace virusperiod {

// Base for everything the library throws on contract or numerical failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (k = 0 iterations, empty trajectory, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Log of a non-positive compartment.
class DomainError : public Error {
public:
    DomainError(const std::string& component, double value)
        : Error("non-positive component " + component + " = " + std::to_string(value)),
          component_(component) {}

    const std::string& component() const noexcept { return component_; }

private:
    std::string component_;
};

// Exponent overflow guard tripped, or a state went non-finite.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class MaxStepsError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// The hypothesis inequality drifted between grid densities (theta >= 1).
class HypothesisError : public Error {
public:
    using Error::Error;
};

}  // namespace virusperiod
