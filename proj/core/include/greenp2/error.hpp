#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace greenp2 {

enum class ErrorCode {
  ChartUndefined,
  OrderExceedsTruncation,
  NoConvergence,
  PositiveDimensional,
  IllConditioned,
  DegenerateMap,
  DegreeMismatch,
  SolverFailure,
  Incomplete,
  Unstable,
  NonIntegerOrder,
  ComponentInvalid,
  NotSuperattracting,
  GenerationFailed,
  ConstructionDegenerate,
  OnCurve,
  FitUnstable,
  ParseError,
  InvalidArgument,
};

/// Stable machine-readable name, e.g. "DegenerateMap".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace greenp2
