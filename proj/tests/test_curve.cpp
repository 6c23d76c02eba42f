#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flowlab/curve.hpp"
#include "flowlab/exact.hpp"
#include "util.hpp"

using namespace flowlab;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

TurningAngleCurve constant_curvature(double kappa, std::size_t n, Vec2 base) {
  TurningAngleCurve c;
  c.closed = true;
  c.base_point = base;
  c.theta.resize(n);
  c.kappa.assign(n, kappa);
  for (std::size_t i = 0; i < n; ++i) c.theta[i] = kTwoPi * double(i) / double(n);
  return c;
}
}  // namespace

TEST_CASE("constant curvature reconstructs a circle") {
  // Tangent at theta = 0 is (1, 0), so the center sits one radius to the
  // left of the base point along the inward normal (0, 1).
  const Polyline p = reconstruct_positions(constant_curvature(0.5, 256, {2, 0}));
  CHECK(p.closed);
  CHECK(testutil::max_radius_error(p, {2.0, 2.0}, 2.0) < 1e-10);
  // Base point at the bottom of the circle puts the center at the origin.
  const Polyline q =
      reconstruct_positions(constant_curvature(0.5, 256, {0, -2}));
  CHECK(testutil::max_radius_error(q, {0.0, 0.0}, 2.0) < 1e-10);
  // Endpoint gap is machine zero after the closure projection.
  CHECK(norm(q.points.front() - Vec2{0.0, -2.0}) < 1e-12);
}

TEST_CASE("grim reaper profile from kappa = cos theta") {
  const std::size_t n = 8193;
  TurningAngleCurve c;
  c.closed = false;
  const double a = 1.3;
  c.theta.resize(n);
  c.kappa.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.theta[i] = -a + 2.0 * a * double(i) / double(n - 1);
    c.kappa[i] = std::cos(c.theta[i]);
  }
  c.base_point = {-a, -std::log(std::cos(a))};
  const Polyline p = reconstruct_positions(c);
  // gamma(theta) = (theta, -log cos theta): the graph of y = -log cos x.
  for (const Vec2& q : p.points)
    CHECK(std::abs(q.y - (-std::log(std::cos(q.x)))) < 1e-6);
  CHECK(std::abs(p.points[n / 2].x) < 1e-6);
  CHECK(std::abs(p.points[n / 2].y) < 1e-6);
}

TEST_CASE("oval curvature reconstructs the sampled oval") {
  const ExactFamily oval{FamilyKind::angenent_oval, 0.0, {0, 0}, 1.0};
  const std::size_t n = 512;
  const TurningAngleCurve c = exact_turning_curve(oval, -1.0, n);
  const Polyline rec = reconstruct_positions(c);
  const Polyline ref = sample_exact(oval, -1.0, n);
  CHECK(hausdorff_distance(rec, ref) < 1e-8);
}

TEST_CASE("closure violation is rejected") {
  TurningAngleCurve c = constant_curvature(1.0, 128, {0, 0});
  // A strong cos-harmonic in 1/kappa breaks the closure conditions.
  for (std::size_t i = 0; i < c.size(); ++i)
    c.kappa[i] = 1.0 / (1.0 + 0.3 * std::cos(c.theta[i]));
  CHECK_THROWS_AS(reconstruct_positions(c), FlowError);
}

TEST_CASE("support function of simple shapes") {
  const ExactFamily circle{FamilyKind::shrinking_circle, 0.0, {0, 0}, 1.0};
  const Polyline cp = sample_exact(circle, -2.0, 512);
  const SupportCurve cs = support_from_polyline(cp, 64);
  for (double h : cs.h) CHECK(h == Approx(2.0).epsilon(1e-9));

  Polyline square;
  square.closed = true;
  square.points = {{0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}};
  const SupportCurve ss = support_from_polyline(square, 64);
  CHECK(ss.center.x == Approx(0.0));
  CHECK(ss.center.y == Approx(0.0));
  CHECK(ss.h[0] == Approx(0.5).epsilon(1e-12));   // h(0) = max x
  CHECK(ss.h[16] == Approx(0.5).epsilon(1e-12));  // h(pi/2) = max y
  CHECK(ss.h[8] == Approx(std::sqrt(0.5)).epsilon(1e-12));  // corner

  const ExactFamily oval{FamilyKind::angenent_oval, 0.0, {0, 0}, 1.0};
  const Polyline op = sample_exact(oval, -1.0, 2048);
  const SupportCurve os = support_from_polyline(op, 256);
  CHECK(os.h[64] == Approx(std::acosh(std::exp(1.0))).epsilon(1e-6));
}

TEST_CASE("support round trip is the identity on matching grids") {
  const ExactFamily oval{FamilyKind::angenent_oval, 0.0, {0, 0}, 1.0};
  const SupportCurve s = exact_support(oval, -1.0, 256);
  const Polyline p = polyline_from_support(s);
  const SupportCurve back = support_from_polyline(p, 256, s.center);
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(std::abs(back.h[i] - s.h[i]) < 1e-8);
}

TEST_CASE("support_from_polyline rejects nonconvex input") {
  Polyline bad;
  bad.closed = true;
  bad.points = {{1, 0}, {0.1, 0.1}, {0, 1}, {-1, 0}, {0, -1}};
  CHECK_FALSE(is_convex(bad));
  CHECK_THROWS_AS(support_from_polyline(bad, 64), FlowError);
}

TEST_CASE("split_graphs of a circle") {
  const ExactFamily circle{FamilyKind::shrinking_circle, 0.0, {0, 0}, 1.0};
  const Polyline p = sample_exact(circle, -0.5, 1024);
  const auto [plus, minus] = split_graphs(p, 257);
  CHECK(plus.y_lo == Approx(-1.0).epsilon(1e-6));
  CHECK(plus.y_hi == Approx(1.0).epsilon(1e-6));
  // v^+(0) = -x_right = -1, v^-(0) = -x_left = +1.
  CHECK(plus.v[128] == Approx(-1.0).epsilon(1e-4));
  CHECK(minus.v[128] == Approx(1.0).epsilon(1e-4));
  // plus branch convex, minus branch concave (discrete second differences).
  const double dpp = plus.v[130] - 2.0 * plus.v[129] + plus.v[128];
  const double dmm = minus.v[130] - 2.0 * minus.v[129] + minus.v[128];
  CHECK(dpp > 0.0);
  CHECK(dmm < 0.0);
}

TEST_CASE("split_graphs oval waist width") {
  const ExactFamily oval{FamilyKind::angenent_oval, 0.0, {0, 0}, 1.0};
  const Polyline p = sample_exact(oval, -1.0, 2048);
  const auto [plus, minus] = split_graphs(p, 513);
  const double waist = minus.v[256] - plus.v[256];
  CHECK(waist == Approx(2.0 * std::acos(std::exp(-1.0))).epsilon(1e-5));
}

TEST_CASE("split_graphs re-merge stays within grid spacing") {
  const Polyline p = testutil::random_convex_polygon(11, 12);
  const Polyline dense = resample(p, 512);
  const auto [plus, minus] = split_graphs(dense, 257);
  Polyline merged;
  merged.closed = true;
  for (std::size_t i = 0; i < plus.size(); ++i)
    merged.points.push_back(plus.point(i));
  for (std::size_t i = minus.size(); i-- > 0;)
    merged.points.push_back(minus.point(i));
  const double spacing = dense.length() / double(dense.size());
  CHECK(hausdorff_distance(merged, dense) <= spacing);
}

TEST_CASE("split_graphs rejects nonconvex and open curves") {
  Polyline bad;
  bad.closed = true;
  bad.points = {{1, 0}, {0.1, 0.1}, {0, 1}, {-1, 0}, {0, -1}};
  CHECK_THROWS_AS(split_graphs(bad, 65), FlowError);
  Polyline open;
  open.closed = false;
  open.points = {{0, 0}, {1, 1}, {2, 0}};
  CHECK_THROWS_AS(split_graphs(open, 65), FlowError);
}

TEST_CASE("hausdorff distances") {
  const ExactFamily circle{FamilyKind::shrinking_circle, 0.0, {0, 0}, 1.0};
  const Polyline a = sample_exact(circle, -0.5, 512);  // radius 1
  CHECK(hausdorff_distance(a, a) == 0.0);
  const Polyline b = sample_exact(circle, -2.0, 512);  // radius 2
  CHECK(hausdorff_distance(a, b) == Approx(1.0).epsilon(2e-3));

  // Circle of radius 1 vs inscribed regular 64-gon: sagitta 1 - cos(pi/64).
  const Polyline dense = sample_exact(circle, -0.5, 65536);
  const Polyline gon = sample_exact(circle, -0.5, 64);
  CHECK(hausdorff_distance(dense, gon) ==
        Approx(1.0 - std::cos(kPi / 64.0)).epsilon(1e-4));
}

TEST_CASE("resample preserves endpoints and spacing") {
  Polyline p;
  p.closed = false;
  p.points = {{0, 0}, {1, 0}, {1, 1}};
  const Polyline r = resample(p, 9);
  CHECK(r.size() == 9);
  CHECK(norm(r.points.front() - Vec2{0, 0}) < 1e-14);
  CHECK(norm(r.points.back() - Vec2{1, 1}) < 1e-14);
  for (std::size_t i = 0; i + 1 < r.size(); ++i)
    CHECK(norm(r.points[i + 1] - r.points[i]) == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("convexity detector tolerates collinear runs") {
  Polyline p;
  p.closed = true;
  p.points = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {0, 1}};
  CHECK(is_convex(p));
  // A vertex dented into the interior makes it reflex.
  p.points = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 0.2}, {0, 1}};
  CHECK_FALSE(is_convex(p));
}

TEST_CASE("inside_convex works for closed and open convex curves") {
  const ExactFamily circle{FamilyKind::shrinking_circle, 0.0, {0, 0}, 1.0};
  const Polyline c = sample_exact(circle, -0.5, 256);
  CHECK(inside_convex({0.0, 0.0}, c));
  CHECK(inside_convex({0.6, 0.6}, c));
  CHECK_FALSE(inside_convex({1.2, 0.0}, c));

  const ExactFamily g{FamilyKind::grim_reaper, 0.0, {0, 0}, 1.0};
  const Polyline grim = sample_exact(g, 0.0, 257, ClipBox{-1.5, 1.5, -1, 8});
  CHECK(inside_convex({0.0, 2.0}, grim));      // above the profile
  CHECK_FALSE(inside_convex({0.0, -0.5}, grim));
}

TEST_CASE("menger curvature of circle points") {
  const double r = 3.0;
  const Vec2 a{r, 0.0}, b{r * std::cos(0.1), r * std::sin(0.1)},
      c{r * std::cos(0.2), r * std::sin(0.2)};
  CHECK(menger_curvature(a, b, c) == Approx(1.0 / r).epsilon(1e-12));
}

TEST_CASE("reconstruction length matches the curvature integral") {
  const ExactFamily oval{FamilyKind::angenent_oval, 0.0, {0, 0}, 1.0};
  const std::size_t n = 1024;
  const TurningAngleCurve c = exact_turning_curve(oval, -1.0, n);
  const Polyline p = reconstruct_positions(c);
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) quad += 1.0 / c.kappa[i];
  quad *= c.dtheta();
  CHECK(p.length() == Approx(quad).epsilon(1e-4));
}
