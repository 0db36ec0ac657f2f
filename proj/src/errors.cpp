#include "movdet/errors.hpp"

namespace movdet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::VelocityOutOfRange: return "VelocityOutOfRange";
    case ErrorCode::FrequencyOutOfTable: return "FrequencyOutOfTable";
    case ErrorCode::NonPositiveWidth: return "NonPositiveWidth";
    case ErrorCode::NullEffect: return "NullEffect";
    case ErrorCode::NonPositiveRatio: return "NonPositiveRatio";
    case ErrorCode::NonPositiveQ: return "NonPositiveQ";
    case ErrorCode::TooFewSteps: return "TooFewSteps";
    case ErrorCode::InconsistentBeat: return "InconsistentBeat";
    case ErrorCode::DegenerateRate: return "DegenerateRate";
    case ErrorCode::TooFewEvents: return "TooFewEvents";
    case ErrorCode::BeatOutOfGrid: return "BeatOutOfGrid";
    case ErrorCode::NonPositiveBeat: return "NonPositiveBeat";
    case ErrorCode::MismatchedParams: return "MismatchedParams";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace movdet
