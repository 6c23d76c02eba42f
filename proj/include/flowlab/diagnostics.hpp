#pragma once

#include <string>
#include <vector>

#include "flowlab/config.hpp"
#include "flowlab/trace.hpp"

namespace flowlab {

// --- scalar quantities ------------------------------------------------------

// Positive shoelace area of a closed simple polyline.
double enclosed_area(const Polyline& p);

struct ClippedArea {
  double area = 0.0;
  Vec2 a;  // crossing with the larger x
  Vec2 b;
};

// Area of the region bounded by the sub-level arc of a convex curve and
// the horizontal line y = level. The curve must cross the level at exactly
// two points (no_crossing / tangent_crossing otherwise).
ClippedArea clipped_area_below_axis(const Polyline& p, double level);

// Gaussian area Theta(t) = (-4 pi t)^{-1/2} * integral of exp(|p|^2/(4t));
// segment integrals are evaluated in closed form. Open curves must extend
// past the radius where the weight falls below the truncation floor.
double gaussian_area(const Polyline& p, double t,
                     const Tolerances& tol = default_tolerances());

// sup over k of k^{-1/2} * integral of exp(-|p|^2/k), scanned on a
// logarithmic k-grid spanning [1e-4, 1e4] * diameter^2. Bounded by a
// dimensional constant for convex curves; the audit ceiling is
// Tolerances::entropy_ceiling.
double entropy_bound_check(const Polyline& p);

// --- trace monitors ---------------------------------------------------------

// Max over (theta, consecutive snapshots) of kappa(theta, t_j) -
// kappa(theta, t_{j+1}). Nonpositive means the curvature never decreased
// in time at fixed turning angle. Only meaningful as an assertion on
// traces of ancient-family data.
double harnack_check(const FlowTrace& trace);

struct DisplacementSample {
  double t;
  double ell;       // max of -y over the snapshot
  double ell_plus_t;
};

std::vector<DisplacementSample> displacement_series(const FlowTrace& trace);

enum class StripVerdict { entire, strip, undetermined };

const char* to_string(StripVerdict v);

struct WidthReport {
  std::vector<double> t;
  std::vector<double> width;  // extent along `axis`
  Vec2 axis;                  // direction minimizing the earliest extent
  StripVerdict verdict = StripVerdict::undetermined;
  double growth_exponent = 0.0;  // slope of log width vs log(-t)
};

WidthReport width_and_strip(const FlowTrace& trace,
                            const Tolerances& tol = default_tolerances());

enum class TipEnd { theta0, thetapi };

// Snapshot translated so the requested tip sits at the origin, oriented
// tip-up (theta=pi tips are rotated by pi). Fails with tip_not_resolved
// when the local node spacing exceeds 0.05 / kappa_tip.
Polyline tip_frame(const Snapshot& snapshot, TipEnd which);

struct GrimFit {
  double r = 0.0;            // fitted width scale
  double r_curvature = 0.0;  // 1 / kappa(tip), independent estimate
  double residual = 0.0;     // Hausdorff misfit at the optimum
  Vec2 tip;
  Vec2 direction{0.0, 1.0};
};

// Fit r * (y = -log cos x) to a tip-frame polyline inside |p| <=
// window_radius by golden-section on the Hausdorff misfit.
GrimFit fit_grim_reaper(const Polyline& tip, double window_radius,
                        const Tolerances& tol = default_tolerances());

// Area of the horizontal-sided trapezium A B p- p+ (AB and p-p+ at their
// own levels); vertices must form a convex quadrilateral.
double trapezium_lower_bound(Vec2 a, Vec2 b, Vec2 p_minus, Vec2 p_plus);

// Parabolically rescaled traces lambda * Gamma(t / lambda^2), resampled
// onto `ref_count` times in the reference window [-2, -1] for each lambda.
// The source trace must cover lambda^{-2} * [-2, -1].
std::vector<FlowTrace> blow_down(const FlowTrace& trace,
                                 const std::vector<double>& lambdas,
                                 std::size_t ref_count = 5);

enum class BlowDownKind { circle, line_mult1, line_mult2, undetermined };

const char* to_string(BlowDownKind k);

struct ClassificationVerdict {
  BlowDownKind kind = BlowDownKind::undetermined;
  double gaussian_area_limit = 0.0;
  Vec2 axis{0.0, 1.0};
  double confidence = 0.0;  // |Theta - matched target|
  std::vector<double> theta_per_scale;
};

// Verdict from the Gaussian area of the rescaled traces at the reference
// time -1: sqrt(2 pi / e) -> circle, 1 -> line_mult1, 2 -> line_mult2
// (within Tolerances::theta_verdict). Needs >= 3 scales spanning a factor
// >= 10. Undetermined is a valid outcome, not an error.
ClassificationVerdict classify_blow_down(
    const std::vector<FlowTrace>& rescaled,
    const std::vector<double>& lambdas,
    const Tolerances& tol = default_tolerances());

struct ReflectionReport {
  double symmetry_defect = 0.0;   // Hausdorff(p, reflected p)
  double disjointness_gap = 0.0;  // signed; negative = penetration depth
};

// Alexandrov reflection across the line x = alpha: reflect the x > alpha
// part and compare it against the x < alpha part of the curve.
ReflectionReport reflection_defect(const Polyline& p, double alpha);

// --- per-snapshot record ----------------------------------------------------

DiagnosticsRecord compute_record(const Snapshot& s, double t,
                                 std::size_t polyline_nodes = 0);

void fill_diagnostics(FlowTrace& trace, std::size_t polyline_nodes = 0);

}  // namespace flowlab
