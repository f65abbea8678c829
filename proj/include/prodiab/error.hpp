#pragma once

#include <stdexcept>
#include <string>

namespace prodiab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument: shape mismatch, index out of range, negative rate.
struct DomainError : Error {
    using Error::Error;
};

// The requested effective model does not exist for these parameters
// (gamma = 0, rate turned negative, non-resonant request to a resonant formula).
struct ModelInapplicable : Error {
    using Error::Error;
};

struct NumericalFailure : Error {
    double time = 0.0;
    NumericalFailure(const std::string& what, double t) : Error(what), time(t) {}
};

struct DegenerateSteadyState : NumericalFailure {
    DegenerateSteadyState(const std::string& what) : NumericalFailure(what, 0.0) {}
};

struct UndefinedCorrelation : Error {
    using Error::Error;
};

struct UnsupportedOrder : Error {
    using Error::Error;
};

}  // namespace prodiab
