#pragma once

#include <stdexcept>
#include <string>

namespace hardyops {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Map-spec text failed to parse, or a parameter is out of range.
/// Positions are 1-based; column points at the offending token.
struct ParseError : Error {
    ParseError(const std::string& msg, int line_, int column_)
        : Error(msg + " (line " + std::to_string(line_) + ", column " +
                std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}

    int line;
    int column;
};

/// Boundary sampling found a point where the map leaves the unit disk.
struct NotSelfMapError : Error {
    using Error::Error;
};

/// The requested operation has no procedure for this map variant,
/// e.g. enumerating preimages of a constant map.
struct UnsupportedMapError : Error {
    using Error::Error;
};

/// An operation that requires an injective map was called on a map
/// not declared univalent.
struct NotUnivalentError : Error {
    using Error::Error;
};

/// A point has no preimage under the map.
struct NotInImageError : Error {
    using Error::Error;
};

/// Polynomial root extraction failed or produced roots that do not
/// satisfy the original equation to working accuracy.
struct RootFindingError : Error {
    using Error::Error;
};

/// No sampling radius in the composition ladder keeps the inner map's
/// sampled modulus inside the unit disk.
struct SamplingRadiusError : Error {
    using Error::Error;
};

/// A truncation or aliasing tolerance could not be met.
struct ToleranceError : Error {
    using Error::Error;
};

/// An adaptive quadrature or summation failed to converge within its
/// refinement budget.
struct QuadratureError : Error {
    using Error::Error;
};

/// An argument violates a documented precondition.
struct PreconditionError : Error {
    using Error::Error;
};

}  // namespace hardyops
