#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, unknown keys, or malformed configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operands whose subsystem dimensions do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A precondition on the physical regime or the requested method was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The Fock-space truncation cannot represent the requested state.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Problem size exceeds a configured resource cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Integrator or linear solver failed, or a produced state is unphysical.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace dicke
