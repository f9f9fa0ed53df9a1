#pragma once

#include <stdexcept>
#include <string>

namespace ccil {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension or length disagreement between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity reached a place that only accepts finite reals.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A cached computation no longer matches the object it was taken from.
class StaleCacheError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccil
