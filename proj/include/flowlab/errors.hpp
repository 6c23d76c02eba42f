#pragma once

#include <stdexcept>
#include <string>

namespace flowlab {

// Every recoverable failure in the library throws FlowError with one of
// these codes. Tests and the CLI dispatch on the code, not the message.
enum class Err {
  invalid_argument,
  time_out_of_window,
  degenerate_clip,
  theta_out_of_range,
  outside_swept_region,
  unsupported_family,
  noncompact_family,
  not_convex,
  not_closed,
  closure_violation,
  convexity_lost,
  grid_mismatch,
  no_crossing,
  tangent_crossing,
  not_trapezium,
  window_not_covered,
  tip_not_resolved,
  poor_fit,
  non_negative_time,
  insufficient_extent,
  not_nested,
  too_few_interior_nodes,
  invalid_shift,
  not_strip_pose,
  branch_degenerate,
  self_intersection,
  config_error,
  io_error,
};

const char* to_string(Err e);

class FlowError : public std::runtime_error {
 public:
  FlowError(Err code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& what) {
  throw FlowError(code, what);
}

}  // namespace flowlab
