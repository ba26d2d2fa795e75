#pragma once

#include <stdexcept>
#include <string>

namespace relpush {

enum class ErrorCode {
  Validation,
  HistoryNotReady,
  MissingCoefficients,
  FieldSingularity,
  IllConditioned,
  ReferenceNotConverged,
  MalformedDocument,
  VerificationMismatch,
  LengthMismatch,
  AllPointsAtFloor,
  Io,
};

const char* to_string(ErrorCode code);

// Numerical failures map to CLI exit code 2, everything else to 1.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace relpush
