#pragma once

#include <stdexcept>
#include <string>

namespace cricket {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON/CSV syntax, missing keys, wrong types).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a data invariant. `field` names the culprit.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Cricsheet document that cannot be mapped onto the canonical schema.
class AdaptationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No resources left to project a final score from (r >= 1).
class SaturationError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (too few matches, missing policy, unknown kind ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Artifact file of the wrong kind or schema version.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

/// Gradient descent produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : Error("diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// Solver reached a state its construction should make impossible.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cricket
