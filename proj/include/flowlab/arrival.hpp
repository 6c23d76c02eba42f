#pragma once

#include <vector>

#include "flowlab/config.hpp"
#include "flowlab/exact.hpp"
#include "flowlab/trace.hpp"

namespace flowlab {

enum class FieldSource { closed_form, reconstructed };

struct GridSpec {
  double x0, x1, y0, y1;
  double h;  // spacing, both directions

  void validate() const;
};

// Arrival time u on a uniform lattice with an in/out mask. u(i,j) is the
// time the curve passes node (x0 + i*h, y0 + j*h); masked-out nodes are
// never read.
struct ArrivalTimeField {
  double x0 = 0.0, y0 = 0.0;
  double hx = 0.0, hy = 0.0;
  std::size_t nx = 0, ny = 0;
  std::vector<double> u;
  std::vector<unsigned char> mask;
  FieldSource source = FieldSource::reconstructed;

  std::size_t idx(std::size_t i, std::size_t j) const { return j * nx + i; }
  bool in(std::size_t i, std::size_t j) const { return mask[idx(i, j)] != 0; }
  Vec2 node(std::size_t i, std::size_t j) const {
    return {x0 + double(i) * hx, y0 + double(j) * hy};
  }
  // Full 3x3 masked-in neighbourhood.
  bool interior(std::size_t i, std::size_t j) const;
  std::size_t count_interior() const;
  double min_u() const;
  // Every lattice segment between in-nodes stays in (row/column scan).
  bool mask_lattice_convex() const;
};

// Gridded closed-form field of an exact family (mask = swept region).
ArrivalTimeField exact_arrival_field(const ExactFamily& f, const GridSpec& g);

// u by linear-in-time interpolation between the two consecutive snapshots
// whose curves bracket each node; nodes never bracketed are masked out.
// Snapshots must be nested (not_nested otherwise).
ArrivalTimeField reconstruct_arrival(const FlowTrace& trace,
                                     const GridSpec& g);

struct HessianAudit {
  double extremal_eigenvalue = 0.0;
  Vec2 argmax_node;
  std::size_t interior_nodes = 0;
};

// Max (over interior nodes) of the larger eigenvalue of the
// central-difference Hessian of u. Concave fields keep this <= O(h).
HessianAudit concavity_audit(const ArrivalTimeField& f);

// Min (over interior nodes) of the smaller Hessian eigenvalue of
// w = -log(u - t); requires t < min u (invalid_shift otherwise). Convex
// for concave arrival times.
HessianAudit w_transform_audit(const ArrivalTimeField& f, double t);

struct ResidualAudit {
  double sup_residual = 0.0;
  Vec2 argmax_node;
  std::size_t degenerate_gradient = 0;  // skipped |Du| < floor
  std::size_t interior_nodes = 0;
};

// sup | -(u_xx u_y^2 - 2 u_xy u_x u_y + u_yy u_x^2)/|Du|^2 - 1 | by central
// differences; nodes with |Du| below the gradient floor (the extinction
// point neighbourhood) are skipped and counted.
ResidualAudit level_set_residual(const ArrivalTimeField& f,
                                 double gradient_floor = 1e-6);

// Same residual from the closed-form gradient and Hessian of an exact
// family at an arbitrary point (no grid).
double exact_level_set_residual(const ExactFamily& f, Vec2 p);

struct RectangleSample {
  double t;
  double lhs;  // min over both tips of |a_t| * (v^-(0,t) - v^+(0,t))
  double rhs;  // -pi t / 4
};

// Width-times-height lower bound per snapshot of a strip-pose trace
// (split into graphs over the y-axis). Traces without a strip verdict are
// rejected with not_strip_pose.
std::vector<RectangleSample> rectangle_claim_audit(
    const FlowTrace& trace, const Tolerances& tol = default_tolerances());

}  // namespace flowlab
