#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "flowlab/errors.hpp"

namespace flowlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 v);
double norm2(Vec2 v);
Vec2 normalized(Vec2 v);
Vec2 rotate(Vec2 v, double angle);
// Left-hand perpendicular (rotation by +pi/2).
Vec2 perp(Vec2 v);

// Ordered point samples of a curve. Closed polylines do not repeat the
// first vertex. Orientation for convex closed curves is counterclockwise.
struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;

  std::size_t size() const { return points.size(); }
  double length() const;
  Vec2 centroid() const;
};

// Support-function representation of a convex body about `center`.
// Node i carries h(theta_i) with theta_i = 2*pi*i/n, the signed distance
// from the center to the tangent line with outward normal
// (cos theta_i, sin theta_i). Radius of curvature rho = h'' + h.
struct SupportCurve {
  std::vector<double> h;
  Vec2 center{0.0, 0.0};

  std::size_t size() const { return h.size(); }
  double theta(std::size_t i) const;
  double dtheta() const;
  // Discrete rho at node i (periodic central second difference).
  double rho(std::size_t i) const;
  double min_rho() const;
  // Throws not_convex unless n >= 16, n a power of two and rho > 0 everywhere.
  void validate() const;
  // Extent of the body along direction u: max <p,u> - min <p,u>.
  double extent(Vec2 u) const;
};

// Curve parametrized by turning angle theta: the tangent at gamma(theta)
// is (cos theta, sin theta) and gamma' = tangent / kappa. base_point is
// gamma(theta.front()). Closed curves span a full period.
struct TurningAngleCurve {
  std::vector<double> theta;
  std::vector<double> kappa;
  Vec2 base_point{0.0, 0.0};
  bool closed = false;

  std::size_t size() const { return theta.size(); }
  double dtheta() const;
  // Residual of the closure conditions (norm of the integrated tangent),
  // relative to curve length.
  double closure_residual() const;
  void validate() const;
};

enum class GraphSide { plus, minus };

// One branch of a convex curve written as a graph over the y-axis. Node i
// sits at ordinate y_lo + i*dy and the curve point is (-v[i], y_i); with
// that sign the plus branch is convex in y and the minus branch concave.
struct GraphCurve {
  double y_lo = 0.0;
  double y_hi = 0.0;
  std::vector<double> v;
  GraphSide side = GraphSide::plus;

  std::size_t size() const { return v.size(); }
  double dy() const;
  double y(std::size_t i) const;
  Vec2 point(std::size_t i) const;
  Polyline polyline() const;
};

// --- polyline primitives -------------------------------------------------

double polyline_length(const Polyline& p);
// Positive shoelace area of a closed simple polyline.
double shoelace_area(const Polyline& p);
// True when consecutive edge cross products have a single sign
// (zeros allowed). `tol_rel` is measured against the largest |cross|.
bool is_convex(const Polyline& p, double tol_rel = 1e-9);
double point_segment_distance(Vec2 q, Vec2 a, Vec2 b);
double point_polyline_distance(Vec2 q, const Polyline& p);
// Strict interior test against the convex region bounded by p (for open
// convex polylines: intersection of the edge half-planes).
bool inside_convex(Vec2 q, const Polyline& p);
// Resample to m points, uniformly in arc length (keeps endpoints for open
// inputs; for closed inputs node 0 stays at the original first vertex).
Polyline resample(const Polyline& p, std::size_t m);
Polyline translate(const Polyline& p, Vec2 delta);
Polyline rotate(const Polyline& p, double angle);
Polyline scale(const Polyline& p, double factor);
// Circumcircle curvature of the vertex triple (a, b, c).
double menger_curvature(Vec2 a, Vec2 b, Vec2 c);

// --- operations -----------------------------------------------------------

// Integrate gamma' = (cos theta, sin theta)/kappa from base_point. Closed
// inputs are closure-projected first (the minimal perturbation of 1/kappa
// killing its first circular harmonics) and integrated spectrally, so the
// returned polyline closes to machine precision; a pre-projection endpoint
// gap above 1e-5 * length is a closure_violation.
Polyline reconstruct_positions(const TurningAngleCurve& c);

// Support function h(theta_i) = max_j <vertex_j - center, u(theta_i)> on n
// uniform nodes. Default center is the vertex centroid.
SupportCurve support_from_polyline(const Polyline& p, std::size_t n,
                                   std::optional<Vec2> center = std::nullopt);

// Vertices center + h*u + h_theta*u' (central-difference h_theta).
Polyline polyline_from_support(const SupportCurve& s);

// Split a convex closed polyline into the two graph branches over the
// y-axis, sampled on `n` uniform ordinates spanning [min y, max y].
// plus carries the right boundary (v = -x_right), minus the left.
std::pair<GraphCurve, GraphCurve> split_graphs(const Polyline& p,
                                               std::size_t n = 129);

// Symmetric vertex-to-segment Hausdorff distance.
double hausdorff_distance(const Polyline& a, const Polyline& b);

}  // namespace flowlab
