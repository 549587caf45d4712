#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sibyl {

enum class ErrorCode {
  kSchemaMismatch,
  kInsufficientReference,
  kInvalidInput,
  kTooLargeForOracle,
  kAlignment,
  kLimitExceeded,
  kInvalidChange,
  kInvalidValue,
  kSchemaError,
  kParseError,
  kNotFound,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the core library. Callers that need to react to a
// specific condition switch on code(); what() is meant for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sibyl
