#include "greenp2/error.hpp"

namespace greenp2 {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ChartUndefined: return "ChartUndefined";
    case ErrorCode::OrderExceedsTruncation: return "OrderExceedsTruncation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PositiveDimensional: return "PositiveDimensional";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::DegenerateMap: return "DegenerateMap";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::Incomplete: return "Incomplete";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::NonIntegerOrder: return "NonIntegerOrder";
    case ErrorCode::ComponentInvalid: return "ComponentInvalid";
    case ErrorCode::NotSuperattracting: return "NotSuperattracting";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::ConstructionDegenerate: return "ConstructionDegenerate";
    case ErrorCode::OnCurve: return "OnCurve";
    case ErrorCode::FitUnstable: return "FitUnstable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace greenp2
