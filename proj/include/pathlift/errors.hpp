#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pathlift {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad scene, dimension mismatch, parameter
/// outside the path domain, point outside the chart.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Expression or scene syntax error at a byte offset of the source text.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ValidationError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Numerical failure: singular or ill-conditioned matrix, non-finite values,
/// integrator breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Expression evaluated outside the domain of one of its functions.
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pathlift
