#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "flowlab/curve.hpp"
#include "flowlab/exact.hpp"

namespace testutil {

using flowlab::Polyline;
using flowlab::SupportCurve;
using flowlab::Vec2;

inline constexpr double kPi = std::numbers::pi;

// Seeded convex polygon: random radii at jittered sorted angles, retried
// (deterministically) until strictly convex.
inline Polyline random_convex_polygon(unsigned seed, std::size_t vertices) {
  for (unsigned attempt = 0;; ++attempt) {
    std::mt19937 rng(seed + 1000 * attempt);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> angles(vertices);
    for (std::size_t i = 0; i < vertices; ++i) {
      const double base = 2.0 * kPi * double(i) / double(vertices);
      angles[i] = base + 0.25 * (uni(rng) - 0.5) * 2.0 * kPi /
                             double(vertices);
    }
    std::sort(angles.begin(), angles.end());
    Polyline p;
    p.closed = true;
    for (std::size_t i = 0; i < vertices; ++i) {
      const double r = 1.0 + 0.18 * (uni(rng) - 0.5);
      p.points.push_back({r * std::cos(angles[i]), r * std::sin(angles[i])});
    }
    if (flowlab::is_convex(p, 1e-6)) return p;
  }
}

inline SupportCurve ellipse_support(double a, double b, std::size_t n) {
  SupportCurve s;
  s.center = {0.0, 0.0};
  s.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * double(i) / double(n);
    s.h[i] = std::sqrt(a * a * std::cos(th) * std::cos(th) +
                       b * b * std::sin(th) * std::sin(th));
  }
  return s;
}

// Independent curvature oracle: osculating circle through three nearby
// sampled points of the curve.
inline double menger_oracle(const Polyline& p, std::size_t i) {
  const std::size_t n = p.size();
  return flowlab::menger_curvature(p.points[(i + n - 1) % n], p.points[i],
                                   p.points[(i + 1) % n]);
}

inline double max_radius_error(const Polyline& p, Vec2 center, double r) {
  double worst = 0.0;
  for (const Vec2& q : p.points)
    worst = std::max(worst, std::abs(flowlab::norm(q - center) - r));
  return worst;
}

}  // namespace testutil
