#include "flowlab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace flowlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double log_cosh(double y) {
  const double a = std::abs(y);
  // log cosh y = |y| - log 2 + log1p(exp(-2|y|)), stable for large |y|.
  return a - std::numbers::ln2 + std::log1p(std::exp(-2.0 * a));
}

// Angenent oval in canonical pose at canonical time t < 0, parametrized by
// turning angle:
//   cos x = e^t cosh y  =>  x = asin(Q sin theta), sinh y = -(Q/E) cos theta
// with E = e^t, Q = sqrt(1 - E^2); kappa^2 = cos^2 theta + E^2/Q^2.
struct OvalFrame {
  double E, Q;

  explicit OvalFrame(double t) : E(std::exp(t)), Q(std::sqrt(-std::expm1(2.0 * t))) {}

  Vec2 point(double theta) const {
    const double x = std::asin(Q * std::sin(theta));
    const double y = std::asinh(-(Q / E) * std::cos(theta));
    return {x, y};
  }
  double kappa(double theta) const {
    const double c = std::cos(theta);
    return std::sqrt(c * c + (E / Q) * (E / Q));
  }
  double half_height() const { return std::acosh(1.0 / E); }
  double half_width() const { return std::acos(E); }
};

}  // namespace

const char* to_string(Err e) {
  switch (e) {
    case Err::invalid_argument: return "InvalidArgument";
    case Err::time_out_of_window: return "TimeOutOfWindow";
    case Err::degenerate_clip: return "DegenerateClip";
    case Err::theta_out_of_range: return "ThetaOutOfRange";
    case Err::outside_swept_region: return "OutsideSweptRegion";
    case Err::unsupported_family: return "Unsupported";
    case Err::noncompact_family: return "NoncompactFamily";
    case Err::not_convex: return "NotConvex";
    case Err::not_closed: return "NotClosed";
    case Err::closure_violation: return "ClosureViolation";
    case Err::convexity_lost: return "ConvexityLost";
    case Err::grid_mismatch: return "GridMismatch";
    case Err::no_crossing: return "NoCrossing";
    case Err::tangent_crossing: return "TangentCrossing";
    case Err::not_trapezium: return "NotTrapezium";
    case Err::window_not_covered: return "WindowNotCovered";
    case Err::tip_not_resolved: return "TipNotResolved";
    case Err::poor_fit: return "PoorFit";
    case Err::non_negative_time: return "NonNegativeTime";
    case Err::insufficient_extent: return "InsufficientExtent";
    case Err::not_nested: return "NotNested";
    case Err::too_few_interior_nodes: return "TooFewInteriorNodes";
    case Err::invalid_shift: return "InvalidShift";
    case Err::not_strip_pose: return "NotStripPose";
    case Err::branch_degenerate: return "BranchDegenerate";
    case Err::self_intersection: return "SelfIntersection";
    case Err::config_error: return "ConfigError";
    case Err::io_error: return "IoError";
  }
  return "UnknownError";
}

const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::stationary_line: return "stationary_line";
    case FamilyKind::shrinking_circle: return "shrinking_circle";
    case FamilyKind::grim_reaper: return "grim_reaper";
    case FamilyKind::angenent_oval: return "angenent_oval";
  }
  return "unknown";
}

std::optional<FamilyKind> family_from_string(const std::string& name) {
  if (name == "stationary_line") return FamilyKind::stationary_line;
  if (name == "shrinking_circle") return FamilyKind::shrinking_circle;
  if (name == "grim_reaper") return FamilyKind::grim_reaper;
  if (name == "angenent_oval") return FamilyKind::angenent_oval;
  return std::nullopt;
}

Vec2 ExactFamily::to_world(Vec2 canonical) const {
  return translation + rotate(canonical * scale, rotation);
}

Vec2 ExactFamily::to_canonical(Vec2 world) const {
  return rotate(world - translation, -rotation) / scale;
}

void ExactFamily::validate() const {
  if (!(scale > 0.0)) raise(Err::invalid_argument, "scale must be positive");
}

void TimeWindow::validate() const {
  if (!(t_start < t_end))
    raise(Err::invalid_argument, "time window must have t_start < t_end");
}

TimeWindow exact_window(const ExactFamily& f) {
  const double inf = std::numeric_limits<double>::infinity();
  switch (f.kind) {
    case FamilyKind::stationary_line:
    case FamilyKind::grim_reaper:
      return {-inf, inf};
    case FamilyKind::shrinking_circle:
    case FamilyKind::angenent_oval:
      return {-inf, 0.0};
  }
  return {-inf, 0.0};
}

namespace {

void check_time(const ExactFamily& f, double t) {
  if (f.compact() && !(t < 0.0))
    raise(Err::time_out_of_window, "family is extinct at t = 0");
}

// Noncompact families are parametrized by arc length from the tip point:
//   line:  p(s) = (s, 0)
//   grim:  s = asinh(tan x), p(s) = (x, t - log cos x)
// Both in the canonical frame at canonical time.
Vec2 noncompact_point(FamilyKind kind, double tc, double s) {
  if (kind == FamilyKind::stationary_line) return {s, 0.0};
  const double x = std::atan(std::sinh(s));
  // log cos x = -log cosh s (cos(atan(sinh s)) = 1/cosh s)
  const double y = tc + log_cosh(s);
  return {x, y};
}

// Largest arc-length window that can matter for a clip box: the curve
// leaves any |p| <= R ball for |s| beyond ~R + |t| + slack.
double arc_cap(FamilyKind kind, double tc, const ClipBox& box) {
  const double rx = std::max(std::abs(box.x_min), std::abs(box.x_max));
  const double ry = std::max(std::abs(box.y_min), std::abs(box.y_max));
  const double r = std::hypot(rx, ry);
  if (kind == FamilyKind::stationary_line) return r + 1.0;
  return r + std::abs(tc) + 4.0;
}

struct ArcWindow {
  double s_lo, s_hi;
};

// Maximal contiguous arc-length window of the world curve inside the clip
// box, found by scanning and bisection refinement of the crossings.
ArcWindow clip_window(const ExactFamily& f, double t, const ClipBox& box) {
  const double tc = f.canonical_time(t);
  const auto world = [&](double s) {
    return f.to_world(noncompact_point(f.kind, tc, s));
  };
  const double cap = arc_cap(f.kind, tc, box) / f.scale;
  const std::size_t probes = 8192;
  std::vector<char> in(probes + 1);
  bool any = false;
  for (std::size_t i = 0; i <= probes; ++i) {
    const double s = -cap + 2.0 * cap * double(i) / double(probes);
    in[i] = box.contains(world(s)) ? 1 : 0;
    any = any || in[i];
  }
  if (!any) raise(Err::degenerate_clip, "clip box misses the curve");

  // Longest run of in-box probes.
  std::size_t best_lo = 0, best_hi = 0, run_lo = 0;
  bool open = false;
  for (std::size_t i = 0; i <= probes; ++i) {
    if (in[i] && !open) {
      open = true;
      run_lo = i;
    }
    const bool closing = open && (!in[i] || i == probes);
    if (closing) {
      const std::size_t hi = in[i] ? i : i - 1;
      if (hi - run_lo > best_hi - best_lo) {
        best_lo = run_lo;
        best_hi = hi;
      }
      open = false;
    }
  }
  const auto s_at = [&](std::size_t i) {
    return -cap + 2.0 * cap * double(i) / double(probes);
  };
  double lo = s_at(best_lo), hi = s_at(best_hi);
  // Refine each edge crossing to 1e-12.
  if (best_lo > 0) {
    double a = s_at(best_lo - 1), b = lo;
    for (int k = 0; k < 60; ++k) {
      const double m = 0.5 * (a + b);
      (box.contains(world(m)) ? b : a) = m;
    }
    lo = b;
  }
  if (best_hi < probes) {
    double a = hi, b = s_at(best_hi + 1);
    for (int k = 0; k < 60; ++k) {
      const double m = 0.5 * (a + b);
      (box.contains(world(m)) ? a : b) = m;
    }
    hi = a;
  }
  if (!(hi > lo)) raise(Err::degenerate_clip, "clip window is degenerate");
  return {lo, hi};
}

}  // namespace

Polyline sample_exact(const ExactFamily& f, double t, std::size_t n,
                      std::optional<ClipBox> clip) {
  f.validate();
  check_time(f, t);
  if (n < 8) raise(Err::invalid_argument, "need at least 8 sample nodes");
  const double tc = f.canonical_time(t);

  Polyline p;
  switch (f.kind) {
    case FamilyKind::shrinking_circle: {
      const double r = std::sqrt(-2.0 * tc);
      p.closed = true;
      p.points.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double a = kTwoPi * double(i) / double(n);
        p.points[i] = f.to_world({r * std::cos(a), r * std::sin(a)});
      }
      return p;
    }
    case FamilyKind::angenent_oval: {
      const OvalFrame oval(tc);
      p.closed = true;
      p.points.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double theta = kTwoPi * double(i) / double(n);
        p.points[i] = f.to_world(oval.point(theta));
      }
      return p;
    }
    case FamilyKind::stationary_line:
    case FamilyKind::grim_reaper: {
      if (!clip)
        raise(Err::invalid_argument,
              "noncompact families need a clip box for sampling");
      const ArcWindow w = clip_window(f, t, *clip);
      p.closed = false;
      p.points.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double s =
            w.s_lo + (w.s_hi - w.s_lo) * double(i) / double(n - 1);
        p.points[i] = f.to_world(noncompact_point(f.kind, tc, s));
      }
      return p;
    }
  }
  raise(Err::invalid_argument, "unknown family");
}

double exact_curvature(const ExactFamily& f, double theta, double t) {
  f.validate();
  check_time(f, t);
  const double tc = f.canonical_time(t);
  const double theta_c = theta - f.rotation;
  switch (f.kind) {
    case FamilyKind::stationary_line:
      return 0.0;
    case FamilyKind::shrinking_circle:
      return 1.0 / (f.scale * std::sqrt(-2.0 * tc));
    case FamilyKind::grim_reaper: {
      // Wrap to (-pi, pi]; the Gauss image is (-pi/2, pi/2).
      double th = std::remainder(theta_c, kTwoPi);
      if (!(std::abs(th) < kPi / 2.0))
        raise(Err::theta_out_of_range, "outside the grim reaper Gauss image");
      return std::cos(th) / f.scale;
    }
    case FamilyKind::angenent_oval:
      return OvalFrame(tc).kappa(theta_c) / f.scale;
  }
  raise(Err::invalid_argument, "unknown family");
}

namespace {

Vec2 canonical_point_check(const ExactFamily& f, Vec2 p) {
  const Vec2 q = f.to_canonical(p);
  switch (f.kind) {
    case FamilyKind::grim_reaper:
    case FamilyKind::angenent_oval:
      if (!(std::abs(q.x) < kPi / 2.0))
        raise(Err::outside_swept_region, "point outside the strip");
      break;
    default:
      break;
  }
  return q;
}

}  // namespace

double exact_arrival_time(const ExactFamily& f, Vec2 p) {
  f.validate();
  const double s2 = f.scale * f.scale;
  switch (f.kind) {
    case FamilyKind::stationary_line:
      raise(Err::unsupported_family,
            "the stationary line sweeps a region with empty interior");
    case FamilyKind::shrinking_circle: {
      const Vec2 q = f.to_canonical(p);
      return -0.5 * norm2(q) * s2;
    }
    case FamilyKind::grim_reaper: {
      const Vec2 q = canonical_point_check(f, p);
      return (q.y + std::log(std::cos(q.x))) * s2;
    }
    case FamilyKind::angenent_oval: {
      const Vec2 q = canonical_point_check(f, p);
      const double u = std::log(std::cos(q.x)) - log_cosh(q.y);
      if (!(u <= 0.0)) raise(Err::outside_swept_region, "point past extinction");
      return u * s2;
    }
  }
  raise(Err::invalid_argument, "unknown family");
}

Vec2 exact_arrival_gradient(const ExactFamily& f, Vec2 p) {
  f.validate();
  Vec2 g;
  switch (f.kind) {
    case FamilyKind::stationary_line:
      raise(Err::unsupported_family, "no arrival time for the line");
    case FamilyKind::shrinking_circle: {
      const Vec2 q = f.to_canonical(p);
      g = {-q.x, -q.y};
      break;
    }
    case FamilyKind::grim_reaper: {
      const Vec2 q = canonical_point_check(f, p);
      g = {-std::tan(q.x), 1.0};
      break;
    }
    case FamilyKind::angenent_oval: {
      const Vec2 q = canonical_point_check(f, p);
      g = {-std::tan(q.x), -std::tanh(q.y)};
      break;
    }
  }
  // u_world(p) = scale^2 * u_c(R^-1 (p - T)/scale): chain rule leaves one
  // factor of scale on the gradient and rotates it back.
  return rotate(g, f.rotation) * f.scale;
}

std::array<double, 3> exact_arrival_hessian(const ExactFamily& f, Vec2 p) {
  f.validate();
  double hxx = 0.0, hyy = 0.0;
  switch (f.kind) {
    case FamilyKind::stationary_line:
      raise(Err::unsupported_family, "no arrival time for the line");
    case FamilyKind::shrinking_circle:
      hxx = hyy = -1.0;
      break;
    case FamilyKind::grim_reaper: {
      const Vec2 q = canonical_point_check(f, p);
      const double sec = 1.0 / std::cos(q.x);
      hxx = -sec * sec;
      hyy = 0.0;
      break;
    }
    case FamilyKind::angenent_oval: {
      const Vec2 q = canonical_point_check(f, p);
      const double sec = 1.0 / std::cos(q.x);
      const double sech = 1.0 / std::cosh(q.y);
      hxx = -sec * sec;
      hyy = -sech * sech;
      break;
    }
  }
  // Canonical Hessians are diagonal; conjugate by the pose rotation.
  const double c = std::cos(f.rotation), s = std::sin(f.rotation);
  const double wxx = c * c * hxx + s * s * hyy;
  const double wyy = s * s * hxx + c * c * hyy;
  const double wxy = c * s * (hxx - hyy);
  return {wxx, wxy, wyy};
}

double exact_enclosed_area(const ExactFamily& f, double t) {
  f.validate();
  if (!f.compact())
    raise(Err::noncompact_family, "enclosed area needs a compact family");
  check_time(f, t);
  return -kTwoPi * t;
}

SupportCurve exact_support(const ExactFamily& f, double t, std::size_t n) {
  f.validate();
  if (!f.compact())
    raise(Err::noncompact_family, "support trace needs a compact family");
  check_time(f, t);
  const double tc = f.canonical_time(t);
  SupportCurve s;
  s.center = f.translation;
  s.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = kTwoPi * double(i) / double(n);
    // Contact point: the turning angle with outward normal u(phi).
    const double theta_c = phi + kPi / 2.0 - f.rotation;
    Vec2 pc;
    if (f.kind == FamilyKind::shrinking_circle) {
      const double r = std::sqrt(-2.0 * tc);
      pc = {r * std::cos(phi - f.rotation), r * std::sin(phi - f.rotation)};
    } else {
      pc = OvalFrame(tc).point(theta_c);
    }
    const Vec2 world = f.to_world(pc);
    s.h[i] = dot(world - s.center, {std::cos(phi), std::sin(phi)});
  }
  return s;
}

TurningAngleCurve exact_turning_curve(const ExactFamily& f, double t,
                                      std::size_t n, double gauss_fraction) {
  f.validate();
  check_time(f, t);
  TurningAngleCurve c;
  switch (f.kind) {
    case FamilyKind::stationary_line:
      raise(Err::unsupported_family, "the line has no positive curvature");
    case FamilyKind::shrinking_circle:
    case FamilyKind::angenent_oval: {
      c.closed = true;
      c.theta.resize(n);
      c.kappa.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        c.theta[i] = f.rotation + kTwoPi * double(i) / double(n);
        c.kappa[i] = exact_curvature(f, c.theta[i], t);
      }
      const double tc = f.canonical_time(t);
      Vec2 pc = (f.kind == FamilyKind::shrinking_circle)
                    ? Vec2{0.0, -std::sqrt(-2.0 * tc)}
                    : OvalFrame(tc).point(0.0);
      c.base_point = f.to_world(pc);
      return c;
    }
    case FamilyKind::grim_reaper: {
      if (!(gauss_fraction > 0.0 && gauss_fraction < 1.0))
        raise(Err::invalid_argument, "gauss_fraction must be in (0,1)");
      const double a = gauss_fraction * kPi / 2.0;
      c.closed = false;
      c.theta.resize(n);
      c.kappa.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double th = -a + 2.0 * a * double(i) / double(n - 1);
        c.theta[i] = f.rotation + th;
        c.kappa[i] = std::cos(th) / f.scale;
      }
      const double tc = f.canonical_time(t);
      const Vec2 tip{-a, tc - std::log(std::cos(-a))};
      c.base_point = f.to_world(tip);
      return c;
    }
  }
  raise(Err::invalid_argument, "unknown family");
}

}  // namespace flowlab
