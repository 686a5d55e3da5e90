#pragma once

#include <stdexcept>
#include <string>

namespace semishadow {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NegativeTime : Error {
    using Error::Error;
};

/// Requested time is not a multiple of the model's time grid.
struct OffGrid : Error {
    using Error::Error;
};

struct NotInvertible : Error {
    using Error::Error;
};

struct ZeroTheta : Error {
    using Error::Error;
};

struct WindowTooSmall : Error {
    using Error::Error;
};

struct NeitherConventionHolds : Error {
    using Error::Error;
};

struct EigFailure : Error {
    using Error::Error;
};

struct SingularResolvent : Error {
    using Error::Error;
};

struct NotHyperbolic : Error {
    using Error::Error;
};

struct InvalidPseudoOrbit : Error {
    using Error::Error;
};

struct BoundNotCertified : Error {
    using Error::Error;
};

struct OutOfRange : Error {
    using Error::Error;
};

struct ParameterTooSmall : Error {
    using Error::Error;
};

/// Support of a lattice state reached the truncation window boundary.
struct WindowExit : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace semishadow
