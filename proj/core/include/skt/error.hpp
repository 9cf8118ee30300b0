#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression source. `offset` is the 0-based character position.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("parse error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset),
        detail_(message) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

/// Evaluation left the real domain of a subexpression (log of a non-positive
/// value, division by zero, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& message, std::string subexpression)
      : Error(message + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// A point lies outside a chart's domain guards, or the metric is degenerate
/// or of the wrong signature there.
class ChartError : public Error {
 public:
  enum class Kind { DomainViolation, DegenerateMetric, SignatureMismatch, BadInput };

  ChartError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Algebraic precondition failure in the curvature-model checks.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A catalog family hypothesis is violated (e.g. beta <= 0).
class CatalogError : public Error {
 public:
  using Error::Error;
};

/// Invalid integrator options or initial data.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace skt
