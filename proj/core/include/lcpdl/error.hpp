#pragma once

#include <stdexcept>
#include <string>

namespace lcpdl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV rows, model files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Arguments or data that violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical subproblem could not be solved (singular system, divergence).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lcpdl
