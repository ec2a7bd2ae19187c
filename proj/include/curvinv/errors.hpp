#pragma once

#include <stdexcept>
#include <string>

namespace curvinv {

/// Division by an expression that normalizes to zero.
class DivisionByZero : public std::domain_error {
 public:
  explicit DivisionByZero(const std::string& what) : std::domain_error(what) {}
};

/// Malformed expression text or invariant DSL text.
class ParseError : public std::invalid_argument {
 public:
  explicit ParseError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Metric whose determinant normalizes to zero.
class SingularMetric : public std::domain_error {
 public:
  explicit SingularMetric(const std::string& what)
      : std::domain_error(what) {}
};

/// Rank, dimension or variance mismatch between a spec and its tensors.
class ShapeMismatch : public std::invalid_argument {
 public:
  explicit ShapeMismatch(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace curvinv
