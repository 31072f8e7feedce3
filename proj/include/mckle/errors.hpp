#pragma once

#include <stdexcept>
#include <string>

namespace mckle {

// Base of every error raised by the library. The CLI maps the subclasses
// onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter outside its family's domain, probability outside (0,1), etc.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An observation lies where the model puts no mass, so g(θ) = +∞.
class SupportError : public Error {
 public:
  using Error::Error;
};

// Input data unusable: empty, non-finite, degenerate.
class DataError : public Error {
 public:
  using Error::Error;
};

// An iterative procedure could not satisfy its stopping rule.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace mckle
