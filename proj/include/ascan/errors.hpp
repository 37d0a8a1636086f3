#pragma once

#include <stdexcept>
#include <string>

namespace ascan {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller passed a value that violates a documented precondition.
struct InvalidArgument : Error {
    using Error::Error;
};

// A file or buffer failed structural validation (bad magic, counts out of
// range, truncated payload, ...).
struct CorruptInput : Error {
    using Error::Error;
};

// Not enough data to do the statistics requested (reference set too small,
// empty chain, ...).
struct InsufficientData : Error {
    using Error::Error;
};

// An iteration failed to produce a usable result (non-finite objective,
// degenerate simplex, singular covariance after regularization, ...).
struct NumericalError : Error {
    using Error::Error;
};

// Filesystem trouble: could not open/read/write.
struct IoError : Error {
    using Error::Error;
};

}  // namespace ascan
