#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace movdet {

/// Failure categories raised by the library. Each maps to a precondition
/// of one of the public operations.
enum class ErrorCode {
  InvalidArgument,
  VelocityOutOfRange,
  FrequencyOutOfTable,
  NonPositiveWidth,
  NullEffect,
  NonPositiveRatio,
  NonPositiveQ,
  TooFewSteps,
  InconsistentBeat,
  DegenerateRate,
  TooFewEvents,
  BeatOutOfGrid,
  NonPositiveBeat,
  MismatchedParams,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace movdet
