#include "valsim/error.hpp"

namespace valsim {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kDegenerateColumn: return "DegenerateColumn";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kSingularSubsample: return "SingularSubsample";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegreesOfFreedomExhausted: return "DegreesOfFreedomExhausted";
    case ErrorCode::kInvalidRatio: return "InvalidRatio";
    case ErrorCode::kDegenerateRate: return "DegenerateRate";
    case ErrorCode::kZeroBaseRate: return "ZeroBaseRate";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace valsim
