#pragma once

#include <stdexcept>
#include <string>

namespace dn {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An evaluation point (or its shifts) hits a singularity of one of the inputs.
struct SingularPoint : Error {
    using Error::Error;
};

/// A denominator vanished beyond round-off; the caller must handle the
/// degenerate branch explicitly.
struct DegenerateDenominator : Error {
    using Error::Error;
};

/// The winding integral did not stabilise near an integer.
struct NonIntegerWinding : Error {
    using Error::Error;
};

/// A declared pole sits on the counting circle |z| = r.
struct PoleOnCircle : Error {
    using Error::Error;
};

/// Pole at the origin with r <= 1: the n(0) log r convention would go negative.
struct OriginPoleSmallRadius : Error {
    using Error::Error;
};

/// The singularity ledger does not cover the requested radius.
struct IncompleteLedger : Error {
    using Error::Error;
};

/// A grid point fell on a declared singularity.
struct SingularGridPoint : Error {
    using Error::Error;
};

/// Too few / degenerate sample points for a fit.
struct DegenerateSample : Error {
    using Error::Error;
};

/// kappa failed the 1-periodicity certificate.
struct NonPeriodicKappa : Error {
    using Error::Error;
};

/// growth_ratio: reference characteristic indistinguishable from quadrature noise.
struct ZeroCharacteristic : Error {
    using Error::Error;
};

/// Unknown catalog id.
struct UnknownEntry : Error {
    using Error::Error;
};

/// A catalog parameter violates the entry's validity constraints.
struct ParameterConstraintViolation : Error {
    using Error::Error;
};

/// Text did not parse; carries a 0-based offset into the input.
struct ParseError : Error {
    std::size_t position;
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

/// Bad run configuration (missing file, malformed schedule, ...).
struct ConfigError : Error {
    using Error::Error;
};

} // namespace dn
