#include "cmaes/errors.hpp"

namespace cmaes {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingFitness: return "MissingFitness";
    case ErrorCode::StaleBatch: return "StaleBatch";
    case ErrorCode::ConditionError: return "ConditionError";
    case ErrorCode::StepSizeOverflow: return "StepSizeOverflow";
    case ErrorCode::NoFeasiblePoints: return "NoFeasiblePoints";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cmaes
