#pragma once

#include <stdexcept>
#include <string>

namespace gaugeline {

// Base for every error raised by the library; the CLI maps these to a
// nonzero exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct MultipleRootsError : Error {
    using Error::Error;
};

// Equilibrium exists but is not a minimum (k <= 0).
struct ConfinementLostError : Error {
    using Error::Error;
};

struct GridTooCoarseError : Error {
    using Error::Error;
};

struct ResolutionError : Error {
    using Error::Error;
};

struct WindowError : Error {
    using Error::Error;
};

struct DiscretizationError : Error {
    using Error::Error;
};

struct NonFiniteError : Error {
    using Error::Error;
};

// Raised by the oracle suite when a validation bound is violated.
struct BoundViolation : Error {
    using Error::Error;
};

}  // namespace gaugeline
