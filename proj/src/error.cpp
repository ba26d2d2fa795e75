#include "relpush/error.hpp"

namespace relpush {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::HistoryNotReady: return "HistoryNotReady";
    case ErrorCode::MissingCoefficients: return "MissingCoefficients";
    case ErrorCode::FieldSingularity: return "FieldSingularity";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::ReferenceNotConverged: return "ReferenceNotConverged";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::VerificationMismatch: return "VerificationMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::AllPointsAtFloor: return "AllPointsAtFloor";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllConditioned:
    case ErrorCode::ReferenceNotConverged:
    case ErrorCode::FieldSingularity:
    case ErrorCode::AllPointsAtFloor:
      return true;
    default:
      return false;
  }
}

}  // namespace relpush
