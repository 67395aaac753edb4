#pragma once

#include <stdexcept>
#include <string>

namespace radact {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration values or settings that cannot be honoured.
struct ConfigError : Error { using Error::Error; };

// Matrix/image dimensions do not match what an operation requires.
struct ShapeError : Error { using Error::Error; };

// Bin or index interval is empty or out of bounds.
struct RangeError : Error { using Error::Error; };

// A sequence is shorter than the transform needs.
struct LengthError : Error { using Error::Error; };

// A frequency band lies outside the available Doppler axis.
struct BandError : Error { using Error::Error; };

// A trajectory does not cover the requested number of pulse intervals.
struct DurationError : Error { using Error::Error; };

// A motion scenario violates the activity state machine.
struct SequenceError : Error { using Error::Error; };

// A state-machine transition that does not exist was requested.
struct TransitionError : Error { using Error::Error; };

// Retained subspace dimension is out of range.
struct RankError : Error { using Error::Error; };

// A label falls outside the declared class set.
struct LabelError : Error { using Error::Error; };

// Class restriction left no usable training exemplars.
struct EmptyClassSetError : Error { using Error::Error; };

// Filesystem failures: missing artifacts, unwritable paths, bad magic.
struct IoError : Error { using Error::Error; };

// An internal invariant that should hold by construction was violated.
struct InternalError : Error { using Error::Error; };

} // namespace radact
