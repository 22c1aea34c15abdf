#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace xps {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation point lies outside the declared domain of a potential.
struct DomainError : Error {
    using Error::Error;
};

/// A potential does not have the vacuum structure an operation requires
/// (e.g. two simple zeros for a double-well computation).
struct ShapeError : Error {
    using Error::Error;
};

/// Two roots closer than the separation tolerance, or a zero without
/// sign change (non-simple zero).
struct DegenerateRootError : Error {
    using Error::Error;
};

/// Stated operation precondition violated by the inputs.
struct PreconditionError : Error {
    using Error::Error;
};

/// Constructor or model parameter outside its admissible range.
struct ParameterError : Error {
    using Error::Error;
};

/// A quadrature, eigensolve or ODE step failed to reach its tolerance.
struct NumericalError : Error {
    NumericalError(const std::string& msg, double achieved = 0.0)
        : Error(msg), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

/// Normalization or dressing integral overflowed; the domain is too wide
/// for the requested parameters.
struct ScalingError : Error {
    using Error::Error;
};

/// Vacua labels inconsistent with the expected flow orientation.
struct OrientationError : Error {
    using Error::Error;
};

/// Instanton span too short to reach the vacuum asymptotes.
struct SpanError : Error {
    using Error::Error;
};

/// Ladder coefficient a(h)^2 went negative: no unitary representation.
struct NonUnitaryError : Error {
    NonUnitaryError(const std::string& msg, double offending_h)
        : Error(msg), h(offending_h) {}
    double h;
};

/// Invalid experiment configuration; message names the offending key.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace xps
