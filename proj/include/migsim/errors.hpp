#pragma once

#include <stdexcept>
#include <string>

namespace migsim {

/// Base class for all migsim errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A migration action targets a state farther from the user than allowed.
struct InvalidActionError : Error {
    using Error::Error;
};

/// Spec or config field violates its invariants.
struct ValidationError : Error {
    using Error::Error;
};

/// Cost-fit input has f(W) == f(0), so the ratio R is undefined.
struct DegenerateInputError : Error {
    using Error::Error;
};

/// Cost-fit input decreases somewhere.
struct NonMonotoneError : Error {
    using Error::Error;
};

/// MDP parameters make the closed-form coefficients undefined (p == 0).
struct DegenerateSpecError : Error {
    using Error::Error;
};

/// A 2x2 segment system of the closed-form evaluation is numerically singular.
struct SingularSegmentError : Error {
    using Error::Error;
};

/// An iterative solver exceeded its iteration cap.
struct NonConvergenceError : Error {
    using Error::Error;
};

/// Malformed trace input; message carries the file and line number.
struct ParseError : Error {
    using Error::Error;
};

/// File or directory could not be opened or written.
struct IoError : Error {
    using Error::Error;
};

/// Trace input contained no usable records.
struct EmptyTraceError : Error {
    using Error::Error;
};

/// Not enough trace data in the estimation window.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// Load snapshot with R * m_max <= m_cur, which makes G_t or G_p diverge.
struct DivergentLoadError : Error {
    using Error::Error;
};

/// Cost reduction requested against a non-positive baseline cost.
struct ZeroBaselineError : Error {
    using Error::Error;
};

} // namespace migsim
