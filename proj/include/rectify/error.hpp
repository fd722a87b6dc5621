#pragma once

#include <stdexcept>
#include <string>

namespace rectify {

/// Failure categories surfaced by the library. Each maps to a stable name
/// used in CLI error messages.
enum class Errc {
  InvalidStudy,
  DegenerateSample,
  NoLabels,
  ConstantPredictions,
  WrongMode,
  InvalidLevel,
  InvalidFraction,
  InfeasibleBudget,
  InvalidGrouping,
  ZeroOutcomeVariance,
  SchemaError,
  ParseError,
  ConfigError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace rectify
