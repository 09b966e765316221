#ifndef CASIMIR_ERRORS_HPP
#define CASIMIR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace casimir {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raw input violates a SystemParams invariant.
struct InvalidParams : Error {
    using Error::Error;
};

// A quantity defined only for K/(eps*omega0) > 1 was requested outside
// that regime.
struct BoundedRegimeRequired : Error {
    using Error::Error;
};

// The truncated Fock space is too small for the requested construction.
struct TruncationTooSmall : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// The phenomenological model has no steady state (2*kappa <= eta*eps*omega0).
struct NoSteadyState : Error {
    using Error::Error;
};

// Adaptive step size underflowed before meeting the local error tolerance.
struct ToleranceNotMet : Error {
    using Error::Error;
};

// Population leaked past the 3/4-dim marker during time evolution.
struct TruncationLeak : Error {
    using Error::Error;
};

// The Liouvillian kernel is not one-dimensional.
struct DegenerateKernel : Error {
    using Error::Error;
};

struct ObservableNotRegistered : Error {
    using Error::Error;
};

// Neither C2 convention matches the fitted beat amplitude.
struct ConventionUnresolvable : Error {
    using Error::Error;
};

} // namespace casimir

#endif
