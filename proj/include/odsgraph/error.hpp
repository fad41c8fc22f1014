#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace odsg {

enum class ErrorCode {
  cycle_detected,
  dangling_edge,
  duplicate_node,
  unknown_node,
  overlapping_sets,
  graph_too_large,
  invalid_roles,
  no_selection_node,
  search_cap_exceeded,
  invalid_target,
  invalid_diagram,
  invalid_network,
  unknown_state,
  positivity_violation,
  zero_cell,
  state_space_too_large,
  zero_probability_evidence,
  selection_under_intervention,
  selection_too_rare,
  not_converged,
  degenerate_marginal,
  parse_error,
  invalid_argument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. The code is stable and is what the
/// CLI reports in its JSON error object; the message is for humans.
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

}  // namespace odsg
