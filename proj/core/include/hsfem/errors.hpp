#pragma once

#include <stdexcept>
#include <string>

namespace hsfem {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument: non-positive extents, mismatched meshes or dimensions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Degenerate element or otherwise unusable geometry.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Value outside the mathematical domain of a closure (negative density, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The operator requires a mesh property (right angles, no obtuse angles) that does not hold.
class UnsupportedMesh : public Error {
public:
    using Error::Error;
};

/// A user supplied function returned a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hsfem
