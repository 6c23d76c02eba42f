#pragma once

#include <array>
#include <optional>
#include <string>

#include "flowlab/curve.hpp"

namespace flowlab {

// The four closed-form ancient solutions. Canonical poses:
//   stationary_line   {(x, 0)}                        for all t
//   shrinking_circle  |p| = sqrt(-2t), extinct at 0   t < 0
//   grim_reaper       cos x = exp(t - y), |x| < pi/2, tip at (0, t)
//   angenent_oval     cos x = exp(t) cosh y, |x| < pi/2, extinct at 0
// A general instance is translation + rotation * (scale * canonical), with
// canonical time t / scale^2 (lengths multiply by scale, times by scale^2).
enum class FamilyKind {
  stationary_line,
  shrinking_circle,
  grim_reaper,
  angenent_oval,
};

const char* to_string(FamilyKind k);
std::optional<FamilyKind> family_from_string(const std::string& name);

struct ExactFamily {
  FamilyKind kind = FamilyKind::shrinking_circle;
  double rotation = 0.0;
  Vec2 translation{0.0, 0.0};
  double scale = 1.0;

  bool compact() const {
    return kind == FamilyKind::shrinking_circle ||
           kind == FamilyKind::angenent_oval;
  }
  Vec2 to_world(Vec2 canonical) const;
  Vec2 to_canonical(Vec2 world) const;
  double canonical_time(double t) const { return t / (scale * scale); }
  void validate() const;
};

struct TimeWindow {
  double t_start = -1.0;
  double t_end = 0.0;

  void validate() const;
};

struct ClipBox {
  double x_min, x_max, y_min, y_max;

  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

// Maximal existence window.
TimeWindow exact_window(const ExactFamily& f);

// n points on the time-t slice, counterclockwise, convex. Compact families
// are sampled uniformly in turning angle; noncompact families uniformly in
// arc length inside the clip box (required for line / grim reaper).
Polyline sample_exact(const ExactFamily& f, double t, std::size_t n,
                      std::optional<ClipBox> clip = std::nullopt);

// kappa(theta, t) > 0 (0 for the stationary line). theta is the world
// turning angle; outside the Gauss image -> theta_out_of_range.
double exact_curvature(const ExactFamily& f, double theta, double t);

// The unique t with p on the time-t slice. Grim reaper: u = y + log cos x;
// oval: u = log cos x - log cosh y; circle: u = -|p|^2/2 (canonical poses).
double exact_arrival_time(const ExactFamily& f, Vec2 p);

// Du at p (closed form, world coordinates). Same domain as arrival time.
Vec2 exact_arrival_gradient(const ExactFamily& f, Vec2 p);

// {u_xx, u_xy, u_yy} at p (closed form, world coordinates).
std::array<double, 3> exact_arrival_hessian(const ExactFamily& f, Vec2 p);

// Enclosed area -2*pi*t for the compact families (any scale).
double exact_enclosed_area(const ExactFamily& f, double t);

// Support function about the family's center on n uniform normal angles
// (compact families only): h(phi) = <gamma(phi + pi/2) - center, u(phi)>.
SupportCurve exact_support(const ExactFamily& f, double t, std::size_t n);

// kappa on a turning-angle grid: closed full-period grid for compact
// families, open symmetric grid covering `gauss_fraction` of the Gauss
// range for the grim reaper.
TurningAngleCurve exact_turning_curve(const ExactFamily& f, double t,
                                      std::size_t n,
                                      double gauss_fraction = 0.95);

}  // namespace flowlab
