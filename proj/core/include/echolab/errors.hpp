#pragma once

#include <stdexcept>
#include <string>

namespace echolab {

enum class ErrorCode {
  invalid_dimension,
  singular_matrix,
  caustic,
  refinement_required,
  integration_failure,
  model_evaluation,
  non_confining,
  singular_orbit,
  assumption_violation,
  invalid_order,
  empty_packet,
  no_levels,
  unsupported_cutoff,
  invalid_exponents,
  degenerate_window,
  resolution,
  domain_leak,
  unsupported_model,
  truncation,
  validation,
  format,
};

/// Library-wide exception. `detail` carries the offending time, index or
/// defect magnitude where the failure has one (NaN otherwise).
class Error : public std::runtime_error {
public:
  Error(ErrorCode c, const std::string& msg, double detail_value = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(msg), code(c), detail(detail_value) {}
  ErrorCode code;
  double detail;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg,
                              double detail = std::numeric_limits<double>::quiet_NaN()) {
  throw Error(c, msg, detail);
}

}  // namespace echolab
