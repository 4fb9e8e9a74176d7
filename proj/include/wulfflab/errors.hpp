#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wulfflab {

enum class ErrorCode {
  InvalidInput,
  UnboundedShape,
  EmptyShape,
  GaugeRatioExceeded,
  MixedRepresentation,
  GridMismatch,
  ResolutionTooCoarse,
  DegenerateAsymmetry,
  EmptyInterior,
  CenterOutside,
  DisconnectedDomain,
  SandwichViolated,
  PointOutside,
  UndersampledCube,
  Unreachable,
  NonConvergence,
  UnknownSuite,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::UnboundedShape: return "UnboundedShape";
    case ErrorCode::EmptyShape: return "EmptyShape";
    case ErrorCode::GaugeRatioExceeded: return "GaugeRatioExceeded";
    case ErrorCode::MixedRepresentation: return "MixedRepresentation";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::DegenerateAsymmetry: return "DegenerateAsymmetry";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::CenterOutside: return "CenterOutside";
    case ErrorCode::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorCode::SandwichViolated: return "SandwichViolated";
    case ErrorCode::PointOutside: return "PointOutside";
    case ErrorCode::UndersampledCube: return "UndersampledCube";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
  }
  return "Unknown";
}

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace wulfflab
