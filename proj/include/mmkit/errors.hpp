#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmkit {

/// Base class of all toolkit errors. `code()` is a stable machine-readable
/// identifier (also used by the CLI error JSON); `what()` is for humans.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// A metric axiom failed. Carries the axiom name and the offending points.
class MetricAxiomViolation : public Error {
 public:
  MetricAxiomViolation(std::string axiom, std::vector<std::string> points,
                       const std::string& message)
      : Error("metric_axiom", message),
        axiom_(std::move(axiom)),
        points_(std::move(points)) {}

  const std::string& axiom() const { return axiom_; }
  const std::vector<std::string>& points() const { return points_; }

 private:
  std::string axiom_;
  std::vector<std::string> points_;
};

class MassError : public Error {
 public:
  explicit MassError(const std::string& message) : Error("mass", message) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& message)
      : Error("dimension_mismatch", message) {}
};

/// An exact search would exceed its configured limit. Never silently
/// degraded to a heuristic; callers may raise the limit instead.
class SizeGuardError : public Error {
 public:
  explicit SizeGuardError(const std::string& message)
      : Error("size_guard", message) {}
};

class DenominatorMismatch : public Error {
 public:
  explicit DenominatorMismatch(const std::string& message)
      : Error("denominator_mismatch", message) {}
};

class PreconditionFailed : public Error {
 public:
  explicit PreconditionFailed(const std::string& message)
      : Error("precondition_failed", message) {}
};

/// A constructive operation produced an object that failed its own
/// re-verification. This signals a bug in the construction, not bad input.
class ConstructionFailed : public Error {
 public:
  explicit ConstructionFailed(const std::string& message)
      : Error("construction_failed", message) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error("parse", message) {}
};

}  // namespace mmkit
