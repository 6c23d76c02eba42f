#pragma once

#include <optional>
#include <vector>

#include "flowlab/exact.hpp"
#include "flowlab/trace.hpp"

namespace flowlab {

enum class Scheme { explicit_euler, semi_implicit };

const char* to_string(Scheme s);

// Time-step control shared by all integrators. Explicit steps obey
// dt = cfl * dtheta^2 * min(rho)^2 (support flow), dt = cfl * dtheta^2 /
// max(kappa)^2 (turning-angle flow) and dt = cfl * min(edge)^2 (front
// tracking); the semi-implicit schemes run at dt_max. Snapshots are
// emitted exactly at t_grid_output (which must lie inside the window).
struct StepControl {
  double dt_max = 1e-3;
  double cfl = 0.4;
  Scheme scheme = Scheme::explicit_euler;
  std::vector<double> t_grid_output;

  void validate() const;
};

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace_times(double t_start, double t_end,
                                   std::size_t n);

// dh/dt = -1/(h'' + h) on the uniform normal-angle grid. Stops with a
// partial trace (status extinction_reached) when min rho falls below
// 1e-6 * initial mean rho; throws convexity_lost if rho becomes negative.
FlowTrace evolve_support(const SupportCurve& h0, const TimeWindow& window,
                         const StepControl& ctl);

// dkappa/dt = kappa^2 kappa'' + kappa^3 on the closed uniform grid, with
// the closure conditions re-projected every step and the base point moved
// by kappa*N - kappa_theta*T (the turning-angle gauge velocity).
FlowTrace evolve_kappa(const TurningAngleCurve& c0, const TimeWindow& window,
                       const StepControl& ctl);

enum class GraphBoundary {
  fixed_ends,
  // Endpoints follow the vertical-tangency points: ghost values come from
  // one-sided quadratic fits in the swapped frame (y as a function of x),
  // whose vertex tracks the turning point.
  free_vertical_tangent,
};

// dv/dt = v_yy / (1 + v_y^2) for a single graph branch.
FlowTrace evolve_graph(const GraphCurve& g0, const TimeWindow& window,
                       const StepControl& ctl,
                       GraphBoundary bc = GraphBoundary::fixed_ends);

// Independent front-tracking oracle: vertices move along the discrete
// normal with speed equal to the Menger curvature of the vertex triple,
// then get redistributed to uniform arc length. First order; >= 32
// vertices required.
FlowTrace evolve_polyline_oracle(const Polyline& p0, const TimeWindow& window,
                                 const StepControl& ctl);

// Trace assembled from closed-form samples of an exact family (no PDE).
// Compact families are sampled by turning angle; noncompact ones need a
// clip box. When tip_frame_clip is set the box is translated with the tip
// (0, t), so nodes of consecutive snapshots correspond.
FlowTrace exact_polyline_trace(const ExactFamily& f,
                               const std::vector<double>& times, std::size_t n,
                               std::optional<ClipBox> clip = std::nullopt,
                               bool tip_frame_clip = false);

FlowTrace exact_support_trace(const ExactFamily& f,
                              const std::vector<double>& times, std::size_t n);

FlowTrace exact_kappa_trace(const ExactFamily& f,
                            const std::vector<double>& times, std::size_t n,
                            double gauss_fraction = 0.95);

}  // namespace flowlab
