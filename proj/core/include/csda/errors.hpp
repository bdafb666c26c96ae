#pragma once

#include <stdexcept>
#include <string>

namespace csda {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented precondition or type invariant.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Dimensions do not line up (window length vs. model input, etc.).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure; message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file parsed but its contents are unusable: bad magic, unsupported
// version, truncated payload, manifest/payload disagreement.
class FormatError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidParameter(message);
}

inline void require_shape(bool condition, const std::string& message) {
  if (!condition) throw ShapeError(message);
}

}  // namespace csda
