#pragma once

#include <stdexcept>
#include <string>

namespace hypersew {

// Base class for every error raised by the library. Each subclass maps to a
// distinct failure mode so callers (and the CLI exit-code table) can
// discriminate without string matching.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A rectangle or partition collapsed to zero width along some axis where a
// positive extent is required.
struct DegenerateDomain : Error {
    using Error::Error;
};

// A breakpoint insertion/removal/lookup referred to a coordinate that is not
// a valid (interior) breakpoint of the partition.
struct InvalidBreakpoint : Error {
    using Error::Error;
};

// A coordinate or midpoint lies outside the interval it must belong to.
struct OutOfRange : Error {
    using Error::Error;
};

// A norm estimate was requested but every sampled pair was degenerate.
struct EmptySample : Error {
    using Error::Error;
};

// A covariance matrix failed to factor (non-PSD beyond tolerance).
struct CovarianceError : Error {
    using Error::Error;
};

// A grid-sampled field was evaluated off its nodes, or two node sets that
// must coincide do not.
struct NodeMismatch : Error {
    using Error::Error;
};

// A Picard iteration on one tile failed to contract within max_iter.
struct ContractionFailure : Error {
    using Error::Error;
};

// Tile halving reached the grid floor without achieving contraction.
struct NoContraction : Error {
    using Error::Error;
};

// Two solutions/problems that must share a grid do not.
struct GridMismatch : Error {
    using Error::Error;
};

} // namespace hypersew
