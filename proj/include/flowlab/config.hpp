#pragma once

namespace flowlab {

// Calibrated tolerances and detection bands. Defaults were fixed by
// refinement studies on the closed-form families; scenario files may
// override the audit-level ones.
struct Tolerances {
  // Blow-down verdicts: |Theta - target| band and the Gaussian-area
  // targets for circle / single line / doubled line.
  double theta_verdict = 0.1;
  // Geometric tie-breaker band: Theta in (mult_lo, mult_hi) falls back to
  // two-branch detection near the axis.
  double mult_lo = 1.1;
  double mult_hi = 1.9;

  // width_and_strip: relative growth below this over the earliest decade
  // of |t| means "strip"; a sqrt-fit exponent inside the band means
  // "entire".
  double strip_growth = 0.05;
  double entire_exponent_lo = 0.4;
  double entire_exponent_hi = 0.6;

  // Monotonicity slacks.
  double harnack_rel = 1e-6;          // vs mean curvature
  double displacement_slack = 1e-6;
  double theta_monotonicity_slack = 1e-6;

  double entropy_ceiling = 10.0;

  // Area laws.
  double area_law_rel = 0.01;         // |A + 2 pi (t - t_ext)| <= rel * |t|
  double area_rate_tol = 0.01;        // |dA/dt + 2 pi| per step pair
  double clipped_speed_margin = 0.01; // -dA_clip/dt <= pi + margin

  // Arrival-time audits: Hessian eigenvalue tolerance C*h.
  double concavity_slope = 5.0;

  // Gaussian quadrature truncation: segments whose nearest point carries
  // relative weight below this are skipped.
  double gaussian_weight_floor = 1e-16;

  // fit_grim_reaper golden-section tolerance and PoorFit threshold
  // (relative to the window radius).
  double grim_fit_tol = 1e-6;
  double grim_poor_fit = 0.1;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace flowlab
