#include "sibyl/error.hpp"

namespace sibyl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaMismatch: return "schema_mismatch";
    case ErrorCode::kInsufficientReference: return "insufficient_reference";
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kTooLargeForOracle: return "too_large_for_oracle";
    case ErrorCode::kAlignment: return "alignment";
    case ErrorCode::kLimitExceeded: return "limit_exceeded";
    case ErrorCode::kInvalidChange: return "invalid_change";
    case ErrorCode::kInvalidValue: return "invalid_value";
    case ErrorCode::kSchemaError: return "schema_error";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kNotFound: return "not_found";
  }
  return "unknown";
}

}  // namespace sibyl
