#pragma once

#include <stdexcept>
#include <string>

namespace weakop {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NotHermitian : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct Singular : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct NotOrthonormal : Error {
  using Error::Error;
};
struct SignMismatch : Error {
  using Error::Error;
};
struct BadAxis : Error {
  using Error::Error;
};
struct NotSymmetry : Error {
  using Error::Error;
};
struct NotFirstOrder : Error {
  using Error::Error;
};
struct NotSquare : Error {
  using Error::Error;
};

/// Raised on malformed configuration input (bad key, bad value).
struct ConfigError : Error {
  using Error::Error;
};
/// Raised on file-system or format problems while reading/writing data files.
struct IoError : Error {
  using Error::Error;
};

}  // namespace weakop
