#pragma once

#include <stdexcept>
#include <string>

namespace stomech {

// Error codes named after the failure they report. Library functions throw
// Error; callers that need to branch on the cause inspect code().
enum class ErrorCode {
  NonPositiveMass,
  NegativeAlphaMag,
  NonFiniteField,
  ZeroStepGrid,
  OverflowingEnsembleSize,
  EnsembleTooSmall,
  IndexOutOfRange,
  OrderTooHigh,
  GridMismatch,
  MissingDerivative,
  MissingVelocity,
  MissingGeometry,
  UnstableParameters,
  SolverDivergence,
  UnsupportedDim,
  UnknownFamily,
  NodeRegionTooLarge,
  ZeroNorm,
  DriftLookupOutOfBox,
  StepTooLarge,
  EmptyEnsemble,
  SingularJacobian,
  DimMismatch,
  SingularMetric,
  ChartExit,
  IncompatibleGauge,
  NonPositiveMassSq,
  JumpProcessRequested,
  ConfigError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NegativeAlphaMag: return "NegativeAlphaMag";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::ZeroStepGrid: return "ZeroStepGrid";
    case ErrorCode::OverflowingEnsembleSize: return "OverflowingEnsembleSize";
    case ErrorCode::EnsembleTooSmall: return "EnsembleTooSmall";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::MissingVelocity: return "MissingVelocity";
    case ErrorCode::MissingGeometry: return "MissingGeometry";
    case ErrorCode::UnstableParameters: return "UnstableParameters";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::UnsupportedDim: return "UnsupportedDim";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::NodeRegionTooLarge: return "NodeRegionTooLarge";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::DriftLookupOutOfBox: return "DriftLookupOutOfBox";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::ChartExit: return "ChartExit";
    case ErrorCode::IncompatibleGauge: return "IncompatibleGauge";
    case ErrorCode::NonPositiveMassSq: return "NonPositiveMassSq";
    case ErrorCode::JumpProcessRequested: return "JumpProcessRequested";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace stomech
