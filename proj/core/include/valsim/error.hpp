#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace valsim {

enum class ErrorCode {
  kInvalidArgument = 1,
  kNotPositiveSemidefinite,
  kSizeMismatch,
  kDegenerateColumn,
  kSingularMatrix,
  kSingularSubsample,
  kEmptyInput,
  kLengthMismatch,
  kDegreesOfFreedomExhausted,
  kInvalidRatio,
  kDegenerateRate,
  kZeroBaseRate,
  kParseError,
  kValidationError,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above; the
/// message names the violated precondition.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace valsim
