#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "flowlab/exact.hpp"
#include "util.hpp"

using namespace flowlab;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

ExactFamily canonical(FamilyKind k) {
  ExactFamily f;
  f.kind = k;
  return f;
}
}  // namespace

TEST_CASE("shrinking circle samples at distance sqrt(-2t)") {
  const ExactFamily f = canonical(FamilyKind::shrinking_circle);
  const Polyline p = sample_exact(f, -2.0, 64);
  CHECK(p.closed);
  CHECK(p.size() == 64);
  CHECK(testutil::max_radius_error(p, {0, 0}, 2.0) < 1e-12);
  CHECK(is_convex(p));
}

TEST_CASE("grim reaper samples satisfy the defining equation") {
  const ExactFamily f = canonical(FamilyKind::grim_reaper);
  const ClipBox box{-1.5, 1.5, -1.0, 6.0};
  const Polyline p = sample_exact(f, 0.0, 129, box);
  CHECK_FALSE(p.closed);
  for (const Vec2& q : p.points) {
    CHECK(std::abs(std::cos(q.x) - std::exp(0.0 - q.y)) < 1e-12);
    CHECK(std::abs(q.y - (-std::log(std::cos(q.x)))) < 1e-12);
  }
  // Arc-length-uniform nodes.
  double e0 = norm(p.points[1] - p.points[0]);
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    CHECK(norm(p.points[i + 1] - p.points[i]) ==
          Approx(e0).epsilon(5e-4));
  CHECK(is_convex(p));
}

TEST_CASE("oval samples hit the derived extremes and defining equation") {
  const ExactFamily f = canonical(FamilyKind::angenent_oval);
  const Polyline p = sample_exact(f, -1.0, 512);
  const double e = std::exp(1.0);
  double ymax = -1e300, xmax = -1e300;
  for (const Vec2& q : p.points) {
    ymax = std::max(ymax, q.y);
    xmax = std::max(xmax, q.x);
    CHECK(std::abs(std::cos(q.x) - std::exp(-1.0) * std::cosh(q.y)) < 1e-12);
  }
  CHECK(ymax == Approx(std::acosh(e)).epsilon(1e-12));        // 1.65745...
  CHECK(xmax == Approx(std::acos(1.0 / e)).epsilon(1e-12));   // 1.19403...
  CHECK(is_convex(p));
}

TEST_CASE("line sampling clips to the box; missing clip is an error") {
  const ExactFamily f = canonical(FamilyKind::stationary_line);
  const ClipBox box{-3.0, 5.0, -1.0, 1.0};
  const Polyline p = sample_exact(f, 0.3, 33, box);
  CHECK(p.points.front().x == Approx(-3.0).epsilon(1e-9));
  CHECK(p.points.back().x == Approx(5.0).epsilon(1e-9));
  for (const Vec2& q : p.points) CHECK(q.y == 0.0);
  CHECK_THROWS_AS(sample_exact(f, 0.3, 33), FlowError);
}

TEST_CASE("sample_exact rejects bad inputs") {
  CHECK_THROWS_AS(sample_exact(canonical(FamilyKind::shrinking_circle), 0.0, 64),
                  FlowError);
  CHECK_THROWS_AS(sample_exact(canonical(FamilyKind::shrinking_circle), 1.0, 64),
                  FlowError);
  CHECK_THROWS_AS(sample_exact(canonical(FamilyKind::shrinking_circle), -1.0, 4),
                  FlowError);
  // Box that misses the curve entirely.
  const ExactFamily g = canonical(FamilyKind::grim_reaper);
  CHECK_THROWS_AS(sample_exact(g, -5.0, 64, ClipBox{-1.0, 1.0, -20.0, -10.0}),
                  FlowError);
}

TEST_CASE("exact curvature values") {
  CHECK(exact_curvature(canonical(FamilyKind::shrinking_circle), 1.234, -2.0) ==
        Approx(0.5).epsilon(1e-14));
  const ExactFamily g = canonical(FamilyKind::grim_reaper);
  CHECK(exact_curvature(g, 0.0, -7.0) == Approx(1.0).epsilon(1e-14));
  CHECK(exact_curvature(g, 0.7, 3.0) == Approx(std::cos(0.7)).epsilon(1e-14));
  CHECK_THROWS_AS(exact_curvature(g, kPi / 2.0, 0.0), FlowError);
  CHECK_THROWS_AS(exact_curvature(g, 2.0, 0.0), FlowError);
  CHECK(exact_curvature(canonical(FamilyKind::stationary_line), 0.4, 0.0) ==
        0.0);
  // Oval tip curvature tends to the translator value 1.
  const ExactFamily oval = canonical(FamilyKind::angenent_oval);
  CHECK(exact_curvature(oval, 0.0, -30.0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oval curvature matches the osculating-circle oracle") {
  const ExactFamily oval = canonical(FamilyKind::angenent_oval);
  const std::size_t n = 16384;
  const Polyline p = sample_exact(oval, -1.0, n);
  for (std::size_t i : {std::size_t(0), n / 8, n / 4, n / 2, 5 * n / 8}) {
    const double theta = 2.0 * kPi * double(i) / double(n);
    const double oracle = testutil::menger_oracle(p, i);
    CHECK(exact_curvature(oval, theta, -1.0) ==
          Approx(oracle).epsilon(1e-5));
  }
}

TEST_CASE("arrival times invert the defining equations") {
  const ExactFamily c = canonical(FamilyKind::shrinking_circle);
  CHECK(exact_arrival_time(c, {1.0, 1.0}) == Approx(-1.0).epsilon(1e-14));
  const ExactFamily g = canonical(FamilyKind::grim_reaper);
  CHECK(exact_arrival_time(g, {0.0, -3.0}) == Approx(-3.0).epsilon(1e-14));
  CHECK(exact_arrival_time(g, {0.5, 2.0}) ==
        Approx(2.0 + std::log(std::cos(0.5))).epsilon(1e-14));
  const ExactFamily oval = canonical(FamilyKind::angenent_oval);
  CHECK(exact_arrival_time(oval, {0.0, std::acosh(std::exp(1.0))}) ==
        Approx(-1.0).epsilon(1e-12));
  CHECK(exact_arrival_time(oval, {0.0, 0.0}) == Approx(0.0));
  CHECK_THROWS_AS(exact_arrival_time(oval, {kPi / 2.0, 0.0}), FlowError);
  CHECK_THROWS_AS(exact_arrival_time(canonical(FamilyKind::stationary_line),
                                     {0.0, 0.0}),
                  FlowError);
}

TEST_CASE("sample / arrival round trip") {
  for (const FamilyKind kind :
       {FamilyKind::shrinking_circle, FamilyKind::angenent_oval}) {
    const ExactFamily f = canonical(kind);
    for (const double t : {-0.37, -1.0, -4.5}) {
      const Polyline p = sample_exact(f, t, 128);
      for (const Vec2& q : p.points)
        CHECK(std::abs(exact_arrival_time(f, q) - t) < 1e-10);
    }
  }
  // Grim reaper too, through the clip path.
  const ExactFamily g = canonical(FamilyKind::grim_reaper);
  const Polyline p = sample_exact(g, -2.0, 64, ClipBox{-1.5, 1.5, -3.0, 4.0});
  for (const Vec2& q : p.points)
    CHECK(std::abs(exact_arrival_time(g, q) - (-2.0)) < 1e-10);
}

TEST_CASE("enclosed area law") {
  CHECK(exact_enclosed_area(canonical(FamilyKind::shrinking_circle), -1.0) ==
        Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(exact_enclosed_area(canonical(FamilyKind::angenent_oval), -1.0) ==
        Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(exact_enclosed_area(canonical(FamilyKind::angenent_oval), -3.0) ==
        Approx(6.0 * kPi).epsilon(1e-14));
  CHECK_THROWS_AS(exact_enclosed_area(canonical(FamilyKind::grim_reaper), -1.0),
                  FlowError);
  // Shoelace cross-check on dense samples.
  const Polyline p =
      sample_exact(canonical(FamilyKind::angenent_oval), -1.0, 4096);
  CHECK(shoelace_area(p) == Approx(2.0 * kPi).epsilon(1e-5));
}

TEST_CASE("scale covariance of sampling") {
  const double r = 0.5;
  ExactFamily unit = canonical(FamilyKind::angenent_oval);
  ExactFamily scaled = unit;
  scaled.scale = r;
  const double t = -1.3;
  const Polyline a = sample_exact(unit, t, 64);
  const Polyline b = sample_exact(scaled, r * r * t, 64);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(norm(b.points[i] - r * a.points[i]) < 1e-12);

  ExactFamily gs = canonical(FamilyKind::grim_reaper);
  gs.scale = r;
  const ClipBox box{-1.2, 1.2, -2.0, 3.0};
  const ClipBox sbox{-r * 1.2, r * 1.2, -r * 2.0, r * 3.0};
  const Polyline ga = sample_exact(canonical(FamilyKind::grim_reaper), t, 64, box);
  const Polyline gb = sample_exact(gs, r * r * t, 64, sbox);
  for (std::size_t i = 0; i < ga.size(); ++i)
    CHECK(norm(gb.points[i] - r * ga.points[i]) < 1e-10);
}

TEST_CASE("pose transforms carry over to all quantities") {
  ExactFamily f = canonical(FamilyKind::angenent_oval);
  f.rotation = 0.7;
  f.translation = {2.0, -1.0};
  f.scale = 1.5;
  const double t = -2.0 * f.scale * f.scale;
  const Polyline p = sample_exact(f, t, 128);
  for (const Vec2& q : p.points)
    CHECK(std::abs(exact_arrival_time(f, q) - t) < 1e-10);
  // Curvature transforms by 1/scale at the rotated angle.
  const ExactFamily base = canonical(FamilyKind::angenent_oval);
  CHECK(exact_curvature(f, 0.3 + f.rotation, t) ==
        Approx(exact_curvature(base, 0.3, t / (f.scale * f.scale)) / f.scale)
            .epsilon(1e-12));
  CHECK(exact_enclosed_area(f, t) == Approx(-2.0 * kPi * t).epsilon(1e-12));
}

TEST_CASE("exact support function matches sampled extremes") {
  const ExactFamily oval = canonical(FamilyKind::angenent_oval);
  const SupportCurve s = exact_support(oval, -1.0, 256);
  // h(pi/2) = top extreme; node 64 of 256.
  CHECK(s.h[64] == Approx(std::acosh(std::exp(1.0))).epsilon(1e-12));
  CHECK(s.h[0] == Approx(std::acos(std::exp(-1.0))).epsilon(1e-12));
  s.validate();

  const SupportCurve sc = exact_support(canonical(FamilyKind::shrinking_circle),
                                        -2.0, 64);
  for (double h : sc.h) CHECK(h == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("exact turning curves close and reconstruct") {
  const ExactFamily oval = canonical(FamilyKind::angenent_oval);
  const TurningAngleCurve c = exact_turning_curve(oval, -1.0, 512);
  c.validate();
  CHECK(c.closure_residual() < 1e-10);
  const ExactFamily g = canonical(FamilyKind::grim_reaper);
  const TurningAngleCurve gc = exact_turning_curve(g, -1.0, 257, 0.9);
  gc.validate();
  CHECK_FALSE(gc.closed);
  CHECK(gc.kappa[128] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("arrival gradient and hessian are consistent with differences") {
  const ExactFamily oval = canonical(FamilyKind::angenent_oval);
  const Vec2 p{0.4, -0.8};
  const double h = 1e-5;
  const Vec2 g = exact_arrival_gradient(oval, p);
  const double gx =
      (exact_arrival_time(oval, {p.x + h, p.y}) -
       exact_arrival_time(oval, {p.x - h, p.y})) /
      (2.0 * h);
  const double gy =
      (exact_arrival_time(oval, {p.x, p.y + h}) -
       exact_arrival_time(oval, {p.x, p.y - h})) /
      (2.0 * h);
  CHECK(g.x == Approx(gx).epsilon(1e-6));
  CHECK(g.y == Approx(gy).epsilon(1e-6));
  const auto [uxx, uxy, uyy] = exact_arrival_hessian(oval, p);
  const double dxx = (exact_arrival_time(oval, {p.x + h, p.y}) -
                      2.0 * exact_arrival_time(oval, p) +
                      exact_arrival_time(oval, {p.x - h, p.y})) /
                     (h * h);
  CHECK(uxx == Approx(dxx).epsilon(1e-4));
  CHECK(uxy == Approx(0.0));
  const double dyy = (exact_arrival_time(oval, {p.x, p.y + h}) -
                      2.0 * exact_arrival_time(oval, p) +
                      exact_arrival_time(oval, {p.x, p.y - h})) /
                     (h * h);
  CHECK(uyy == Approx(dyy).epsilon(1e-4));
}

TEST_CASE("time windows") {
  CHECK(exact_window(canonical(FamilyKind::shrinking_circle)).t_end == 0.0);
  CHECK(exact_window(canonical(FamilyKind::angenent_oval)).t_end == 0.0);
  CHECK(std::isinf(exact_window(canonical(FamilyKind::grim_reaper)).t_end));
}
