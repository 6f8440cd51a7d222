#include "mmrkit/error.hpp"

namespace mmrkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::UnsupportedRule: return "UnsupportedRule";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InfeasibleState: return "InfeasibleState";
    case ErrorCode::NonPositiveEstimate: return "NonPositiveEstimate";
    case ErrorCode::DegenerateFirstStage: return "DegenerateFirstStage";
    case ErrorCode::InfeasibleInputs: return "InfeasibleInputs";
    case ErrorCode::InfeasiblePropensities: return "InfeasiblePropensities";
  }
  return "Unknown";
}

}  // namespace mmrkit
