#pragma once

#include <stdexcept>
#include <string>

namespace freecp {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Shape or size mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Matrix expected to be positive semi-definite has a clearly negative eigenvalue.
class NotPsdError : public Error {
 public:
  NotPsdError(const std::string& what, double min_eigenvalue)
      : Error(what + ": not PSD (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// An iterative kernel did not converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long dimension)
      : Error(what + " (dimension " + std::to_string(dimension) + ")"), dimension_(dimension) {}
  long dimension() const noexcept { return dimension_; }

 private:
  long dimension_;
};

/// The frame operator sum X_i^* X_i is numerically singular.
class SingularFrameError : public Error {
 public:
  SingularFrameError(double min_eigenvalue, long dimension)
      : Error("near-singular frame: min eigenvalue " + std::to_string(min_eigenvalue) +
              " of sum X_i^* X_i at dimension " + std::to_string(dimension)),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Invalid user-facing configuration; carries the offending field name.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Syntax error in a configuration file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace freecp
