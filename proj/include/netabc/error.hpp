#pragma once

#include <stdexcept>
#include <string>

namespace netabc {

/// Base of every error raised by the library. The CLI maps each subclass to
/// its own exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Out-of-range or non-finite model, prior or design values.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A state violated one of the network invariants.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Observed and simulated summary layouts cannot be compared.
class LayoutMismatch : public Error {
public:
    using Error::Error;
};

/// Unreadable or malformed input file.
class IoError : public Error {
public:
    using Error::Error;
};

class EmptyPosterior : public Error {
public:
    using Error::Error;
};

/// Closed-form quantity undefined for the given arguments.
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace netabc
