#pragma once

#include <stdexcept>
#include <string>

namespace covertnet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: shape mismatch, non-finite coordinates, empty inputs.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. distance <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A method exists but cannot handle this input (e.g. exact union area for N > 2).
class UnsupportedMethod : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search would exceed its configured budget.
class SearchBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Configuration references an unknown name or violates a config invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Wraps an error with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, bool validation)
      : Error(stage + ": " + what), stage_(std::move(stage)), validation_(validation) {}
  const std::string& stage() const noexcept { return stage_; }
  bool is_validation() const noexcept { return validation_; }

 private:
  std::string stage_;
  bool validation_;
};

}  // namespace covertnet
