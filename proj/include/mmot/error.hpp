#pragma once

#include <stdexcept>
#include <string>

namespace mmot {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: shape mismatch, out-of-range index, bad mass vector.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A parameter combination the library deliberately does not solve.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Simplex pivot budget exhausted. Distinct from an infeasibility verdict.
class IterationLimit : public Error {
 public:
  using Error::Error;
};

// An iterative numerical method failed to converge.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// File or text format problems; the message carries the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmot
