#pragma once

#include <stdexcept>
#include <string>

namespace blimpassist {

enum class ErrorCode {
  NonPositiveParameter,
  ThrustExceedsBalanceRange,
  TiltOutOfRange,
  ModelRegionViolation,
  NonMonotoneClock,
  NonMonotoneLog,
  InvalidScenario,
  InvalidConfig,
  ParseError,
  EmptyTrace,
  ScenarioMismatch,
  MalformedMessage,
  PortInUse,
  Io,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library. `detail()` carries the offending
/// field name, path or reason, depending on the code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// IO failures map to a different CLI exit code than validation failures.
  bool is_io() const noexcept { return code_ == ErrorCode::Io; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace blimpassist
