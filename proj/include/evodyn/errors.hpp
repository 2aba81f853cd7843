#pragma once

#include <stdexcept>
#include <string>

namespace evodyn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector/matrix sizes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value lies outside the domain where the requested quantity is defined
// (boundary states for effective landscapes, nonpositive mean fitness, a
// divergent escort integral, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A metric or escort failed to produce a usable geometry at a state.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// An incentive or landscape produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// The requested operation is not defined for this kind of object.
class UnsupportedKindError : public Error {
 public:
  using Error::Error;
};

// User-supplied parameters violate a precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace evodyn
