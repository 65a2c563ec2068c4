#pragma once

#include <stdexcept>
#include <string>

namespace hvlab {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input outside the mathematical domain of an operation (non-finite angle,
// setting not in a model's setting set, probability outside [0,1], ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

// A probability table failed its normalization/positivity invariants.
// Messages name the offending table and row.
class ValidationError : public Error {
  public:
    using Error::Error;
};

// A model file could not be read or decoded.
class ParseError : public Error {
  public:
    using Error::Error;
};

// The requested analysis needs exact structure (enumerable supports, delta
// nonlocal part) that the model does not expose.
class UnsupportedModelError : public Error {
  public:
    using Error::Error;
};

}  // namespace hvlab
