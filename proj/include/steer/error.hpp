#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace steer {

enum class ErrorKind {
  invalid_argument,
  undefined_metric,
  below_validity_floor,
  degenerate_dimension,
  unknown_dimension,
  out_of_range,
  insufficient_seeds,
  non_convergence,
  invalid_strategy,
  transport_failure,
  credential_error,
  extraction_failure,
  no_valid_candidate,
  zero_request,
  undefined_tau,
  empty_input,
  insufficient_strata,
  degenerate_pairs,
  parse_error,
  io_error,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::undefined_metric: return "undefined-metric";
    case ErrorKind::below_validity_floor: return "below-validity-floor";
    case ErrorKind::degenerate_dimension: return "degenerate-dimension";
    case ErrorKind::unknown_dimension: return "unknown-dimension";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::insufficient_seeds: return "insufficient-seeds";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::invalid_strategy: return "invalid-strategy";
    case ErrorKind::transport_failure: return "transport-failure";
    case ErrorKind::credential_error: return "credential-error";
    case ErrorKind::extraction_failure: return "extraction-failure";
    case ErrorKind::no_valid_candidate: return "no-valid-candidate";
    case ErrorKind::zero_request: return "zero-request";
    case ErrorKind::undefined_tau: return "undefined-tau";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::insufficient_strata: return "insufficient-strata";
    case ErrorKind::degenerate_pairs: return "degenerate-pairs";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace steer
