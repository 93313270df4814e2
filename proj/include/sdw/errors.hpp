#ifndef SDW_ERRORS_HPP
#define SDW_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdw {

enum class ErrorCode {
  PointOutsideChart,
  UnsupportedOrder,
  NonPositiveConformalFactor,
  InsufficientJetOrder,
  DegenerateMetric,
  DegenerateEigenvalue,
  ZeroLambda3,
  StencilOutsideChart,
  StencilOutsideValidity,
  HypothesisViolated,
  InvalidSpec,
  ConfigParseError,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::PointOutsideChart: return "PointOutsideChart";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::NonPositiveConformalFactor: return "NonPositiveConformalFactor";
    case ErrorCode::InsufficientJetOrder: return "InsufficientJetOrder";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorCode::ZeroLambda3: return "ZeroLambda3";
    case ErrorCode::StencilOutsideChart: return "StencilOutsideChart";
    case ErrorCode::StencilOutsideValidity: return "StencilOutsideValidity";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ConfigParseError: return "ConfigParseError";
  }
  return "Unknown";
}

class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw GeometryError(code, what); }

}  // namespace sdw

#endif  // SDW_ERRORS_HPP
