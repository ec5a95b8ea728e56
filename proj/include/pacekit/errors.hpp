#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pacekit {

enum class ErrorCode {
  invalid_argument = 1,
  atom_has_no_density,
  quadrature_non_convergence,
  unknown_dataset,
  mixed_families,
  empty_sample,
  nonpositive_bandwidth,
  degenerate_sample,
  bisection_bracket_failure,
  all_zero_plan,
  indivisible_horizon,
  invalid_config,
  protocol_violation,
  overcharge,
  empty_lists,
  empty_table,
  io_error,
  parse_error,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can translate exceptions into stable integers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace pacekit
