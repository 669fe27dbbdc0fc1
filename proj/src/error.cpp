#include "hpaudit/error.hpp"

namespace hpaudit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ExpectationOutOfRange: return "ExpectationOutOfRange";
    case ErrorCode::JointInconsistency: return "JointInconsistency";
    case ErrorCode::OddBatch: return "OddBatch";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::FamilyContractViolated: return "FamilyContractViolated";
    case ErrorCode::TooLarge: return "TooLarge";
  }
  return "Unknown";
}

}  // namespace hpaudit
