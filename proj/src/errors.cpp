#include "emot/errors.hpp"

namespace emot {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyRow: return "EmptyRow";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kInvalidWeight: return "InvalidWeight";
    case ErrorCode::kPotentialOverflow: return "PotentialOverflow";
    case ErrorCode::kColumnUnderflow: return "ColumnUnderflow";
    case ErrorCode::kLineSearchFailed: return "LineSearchFailed";
    case ErrorCode::kAdaptiveStall: return "AdaptiveStallError";
    case ErrorCode::kOracleAmbiguity: return "OracleAmbiguity";
    case ErrorCode::kZeroColumn: return "ZeroColumn";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace emot
