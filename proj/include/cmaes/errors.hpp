#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmaes {

enum class ErrorCode {
  NonFinite,
  NotPositiveDefinite,
  DimensionMismatch,
  DimensionTooSmall,
  InvalidWeights,
  InvalidLambda,
  InvalidArgument,
  MissingFitness,
  StaleBatch,
  ConditionError,
  StepSizeOverflow,
  NoFeasiblePoints,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cmaes
