#pragma once

#include <stdexcept>
#include <string>

namespace arclab {

/// Process exit codes, one per error class.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kNumeric = 3,
  kHypothesis = 4,
};

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what, ExitCode code)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), code_(code) {}

  const std::string& kind() const noexcept { return kind_; }
  ExitCode code() const noexcept { return code_; }

 private:
  std::string kind_;
  ExitCode code_;
};

/// Malformed configuration or arguments.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error("ConfigError", what, ExitCode::kConfig) {}
};

/// Floating-point trouble: near-singular systems, small divisors, lost precision.
class NumericError : public Error {
 public:
  NumericError(std::string kind, const std::string& what)
      : Error(std::move(kind), what, ExitCode::kNumeric) {}
};

/// A mathematical precondition of the construction does not hold for the input.
class HypothesisError : public Error {
 public:
  HypothesisError(std::string kind, const std::string& what)
      : Error(std::move(kind), what, ExitCode::kHypothesis) {}
};

}  // namespace arclab
