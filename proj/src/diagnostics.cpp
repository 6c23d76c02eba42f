#include "flowlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "flowlab/numerics.hpp"

namespace flowlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double enclosed_area(const Polyline& p) {
  if (!p.closed) raise(Err::not_closed, "enclosed_area needs a closed curve");
  return shoelace_area(p);
}

ClippedArea clipped_area_below_axis(const Polyline& p, double level) {
  const std::size_t n = p.size();
  if (n < 3) raise(Err::invalid_argument, "clipped area needs a curve");
  double scale = 0.0;
  for (const Vec2& q : p.points) scale = std::max(scale, std::abs(q.y - level));
  const double eps = 1e-12 * std::max(scale, 1.0);

  for (const Vec2& q : p.points)
    if (std::abs(q.y - level) < eps)
      raise(Err::tangent_crossing, "vertex sits on the axis level");

  struct Crossing {
    std::size_t edge;
    Vec2 at;
  };
  std::vector<Crossing> crossings;
  const std::size_t m = p.closed ? n : n - 1;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = p.points[i], b = p.points[(i + 1) % n];
    const double fa = a.y - level, fb = b.y - level;
    if (fa * fb < 0.0) {
      const double w = fa / (fa - fb);
      crossings.push_back({i, a + w * (b - a)});
    }
  }
  if (crossings.empty()) raise(Err::no_crossing, "curve misses the axis");
  if (crossings.size() != 2)
    raise(Err::no_crossing, "curve must cross the axis exactly twice");

  // Walk the curve once, keeping the vertices strictly below the level
  // between the two crossings (either ordering of the crossings along the
  // walk works; pick the arc whose interior vertices lie below).
  const auto arc_below = [&](std::size_t e0, Vec2 a0, std::size_t e1,
                             Vec2 a1) {
    Polyline region;
    region.closed = true;
    region.points.push_back(a0);
    std::size_t i = e0;
    while (i != e1) {
      const std::size_t nxt = (i + 1) % n;
      region.points.push_back(p.points[nxt]);
      i = nxt;
      if (region.points.size() > n + 2) break;  // degenerate
    }
    region.points.push_back(a1);
    return region;
  };

  Polyline arc1 = arc_below(crossings[0].edge, crossings[0].at,
                            crossings[1].edge, crossings[1].at);
  bool arc1_below = true;
  for (std::size_t i = 1; i + 1 < arc1.points.size(); ++i)
    arc1_below = arc1_below && arc1.points[i].y < level;

  Polyline region;
  if (arc1_below && arc1.points.size() >= 2) {
    region = arc1;
  } else {
    if (!p.closed)
      raise(Err::no_crossing, "open curve has no sub-level arc");
    region = arc_below(crossings[1].edge, crossings[1].at, crossings[0].edge,
                       crossings[0].at);
    for (std::size_t i = 1; i + 1 < region.points.size(); ++i)
      if (region.points[i].y >= level)
        raise(Err::no_crossing, "no sub-level arc found");
  }

  ClippedArea out;
  out.area = shoelace_area(region);
  const Vec2 c0 = crossings[0].at, c1 = crossings[1].at;
  out.a = (c0.x > c1.x) ? c0 : c1;
  out.b = (c0.x > c1.x) ? c1 : c0;
  return out;
}

double gaussian_area(const Polyline& p, double t, const Tolerances& tol) {
  if (!(t < 0.0)) raise(Err::non_negative_time, "Gaussian area needs t < 0");
  const double tau = -4.0 * t;
  if (!p.closed) {
    if (endpoint_gaussian_weight(p, tau) > tol.gaussian_weight_floor)
      raise(Err::insufficient_extent,
            "open curve clipped before the Gaussian weight decays");
  }
  return gaussian_weighted_length(p, tau);
}

double entropy_bound_check(const Polyline& p) {
  if (p.size() < 2) raise(Err::invalid_argument, "entropy needs a curve");
  double d = 0.0;
  for (const Vec2& a : p.points)
    for (const Vec2& b : p.points) d = std::max(d, norm2(b - a));
  d = std::max(std::sqrt(d), 1e-12);
  double best = 0.0;
  const int steps = 161;
  for (int i = 0; i < steps; ++i) {
    const double ek = -4.0 + 8.0 * double(i) / double(steps - 1);
    const double k = d * d * std::pow(10.0, ek);
    // k^{-1/2} integral of exp(-|p|^2/k) = sqrt(pi) * normalized mass.
    best = std::max(best,
                    std::sqrt(kPi) * gaussian_weighted_length(p, k));
  }
  return best;
}

double harnack_check(const FlowTrace& trace) {
  trace.validate();
  if (trace.size() < 2)
    raise(Err::invalid_argument, "harnack check needs >= 2 snapshots");
  const auto* first = std::get_if<TurningAngleCurve>(&trace.snapshots.front());
  if (!first)
    raise(Err::grid_mismatch, "harnack check needs turning-angle snapshots");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < trace.size(); ++j) {
    const auto& a = std::get<TurningAngleCurve>(trace.snapshots[j]);
    const auto& b = std::get<TurningAngleCurve>(trace.snapshots[j + 1]);
    if (a.theta.size() != b.theta.size())
      raise(Err::grid_mismatch, "snapshots use different theta grids");
    for (std::size_t i = 0; i < a.theta.size(); ++i) {
      if (std::abs(a.theta[i] - b.theta[i]) > 1e-12)
        raise(Err::grid_mismatch, "snapshots use different theta grids");
      worst = std::max(worst, a.kappa[i] - b.kappa[i]);
    }
  }
  return worst;
}

std::vector<DisplacementSample> displacement_series(const FlowTrace& trace) {
  trace.validate();
  std::vector<DisplacementSample> out;
  out.reserve(trace.size());
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const Polyline p = snapshot_polyline(trace.snapshots[j]);
    double ell = -std::numeric_limits<double>::infinity();
    for (const Vec2& q : p.points) ell = std::max(ell, -q.y);
    out.push_back({trace.times[j], ell, ell + trace.times[j]});
  }
  return out;
}

const char* to_string(StripVerdict v) {
  switch (v) {
    case StripVerdict::entire: return "entire";
    case StripVerdict::strip: return "strip";
    case StripVerdict::undetermined: return "undetermined";
  }
  return "unknown";
}

WidthReport width_and_strip(const FlowTrace& trace, const Tolerances& tol) {
  trace.validate();
  if (trace.size() < 3)
    raise(Err::invalid_argument, "width verdict needs >= 3 snapshots");

  const Polyline first = snapshot_polyline(trace.snapshots.front());
  const auto extent_along = [](const Polyline& p, Vec2 u) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec2& q : p.points) {
      const double s = dot(q, u);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    return hi - lo;
  };
  // Direction minimizing the extent of the earliest snapshot.
  double best_ang = 0.0, best_ext = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 360; ++i) {
    const double a = kPi * double(i) / 360.0;
    const double e = extent_along(first, {std::cos(a), std::sin(a)});
    if (e < best_ext) {
      best_ext = e;
      best_ang = a;
    }
  }
  const double refined = golden_minimize(
      [&](double a) {
        return extent_along(first, {std::cos(a), std::sin(a)});
      },
      best_ang - kPi / 360.0, best_ang + kPi / 360.0, 1e-10);
  const Vec2 axis{std::cos(refined), std::sin(refined)};

  WidthReport rep;
  rep.axis = axis;
  for (std::size_t j = 0; j < trace.size(); ++j) {
    rep.t.push_back(trace.times[j]);
    rep.width.push_back(
        extent_along(snapshot_polyline(trace.snapshots[j]), axis));
  }

  // Strip test: relative growth over the earliest decade of |t|.
  const double t0 = rep.t.front();
  bool have_decade = false;
  double w_end_decade = rep.width.front();
  if (t0 < 0.0) {
    for (std::size_t j = 0; j < rep.t.size(); ++j) {
      if (rep.t[j] <= t0 / 10.0) {
        w_end_decade = rep.width[j];
        have_decade = true;
      }
    }
  }
  const double growth =
      std::abs(w_end_decade - rep.width.front()) / rep.width.front();

  // Entire test: width ~ sqrt(-t).
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < rep.t.size(); ++j) {
    if (rep.t[j] < 0.0 && rep.width[j] > 0.0) {
      lx.push_back(std::log(-rep.t[j]));
      ly.push_back(std::log(rep.width[j]));
    }
  }
  if (lx.size() >= 3) rep.growth_exponent = ls_slope(lx, ly);

  if (have_decade && growth < tol.strip_growth) {
    rep.verdict = StripVerdict::strip;
  } else if (lx.size() >= 3 &&
             rep.growth_exponent >= tol.entire_exponent_lo &&
             rep.growth_exponent <= tol.entire_exponent_hi) {
    rep.verdict = StripVerdict::entire;
  } else {
    rep.verdict = StripVerdict::undetermined;
  }
  return rep;
}

Polyline tip_frame(const Snapshot& snapshot, TipEnd which) {
  Polyline p = snapshot_polyline(snapshot);
  const std::size_t n = p.size();
  if (n < 3) raise(Err::invalid_argument, "tip frame needs a curve");
  std::size_t it = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const bool better = (which == TipEnd::theta0)
                            ? p.points[i].y < p.points[it].y
                            : p.points[i].y > p.points[it].y;
    if (better) it = i;
  }
  const Vec2 tip = p.points[it];

  // Local resolution at the tip.
  const std::size_t im = (it + n - 1) % n, ip = (it + 1) % n;
  if (!p.closed && (it == 0 || it + 1 == n))
    raise(Err::tip_not_resolved, "tip sits on the clip boundary");
  const double kappa_tip =
      menger_curvature(p.points[im], p.points[it], p.points[ip]);
  const double spacing = 0.5 * (norm(p.points[ip] - p.points[it]) +
                                norm(p.points[it] - p.points[im]));
  if (kappa_tip > 0.0 && spacing > 0.05 / kappa_tip)
    raise(Err::tip_not_resolved, "node spacing too coarse at the tip");

  Polyline out = translate(p, Vec2{0.0, 0.0} - tip);
  if (which == TipEnd::thetapi) out = rotate(out, kPi);
  return out;
}

GrimFit fit_grim_reaper(const Polyline& tip, double window_radius,
                        const Tolerances& tol) {
  if (!(window_radius > 0.0))
    raise(Err::invalid_argument, "window radius must be positive");
  Polyline window;
  window.closed = false;
  for (const Vec2& q : tip.points)
    if (norm(q) <= window_radius) window.points.push_back(q);
  if (window.size() < 5)
    raise(Err::invalid_argument, "tip window needs >= 5 nodes");

  // Independent curvature estimate at the lowest windowed node.
  std::size_t it = 0;
  for (std::size_t i = 1; i < window.size(); ++i)
    if (window.points[i].y < window.points[it].y) it = i;
  double r_curv = 0.0;
  if (it > 0 && it + 1 < window.size()) {
    const double k = menger_curvature(window.points[it - 1], window.points[it],
                                      window.points[it + 1]);
    if (k > 0.0) r_curv = 1.0 / k;
  }

  const auto profile = [&](double r) {
    // r * (y = -log cos x) clipped to the window radius.
    Polyline prof;
    prof.closed = false;
    const std::size_t m = 257;
    const double xmax =
        std::min(window_radius, r * kPi / 2.0 * (1.0 - 1e-9));
    for (std::size_t i = 0; i < m; ++i) {
      const double x = -xmax + 2.0 * xmax * double(i) / double(m - 1);
      const double y = -r * std::log(std::cos(x / r));
      if (std::hypot(x, y) <= window_radius) prof.points.push_back({x, y});
    }
    return prof;
  };
  const auto misfit = [&](double r) {
    return hausdorff_distance(window, profile(r));
  };

  const double guess = (r_curv > 0.0) ? r_curv : window_radius;
  const double lo = std::max(1e-3 * guess, 0.05 * guess);
  const double hi = 5.0 * guess;
  const double r = golden_minimize(misfit, lo, hi, tol.grim_fit_tol);

  GrimFit fit;
  fit.r = r;
  fit.r_curvature = r_curv;
  fit.residual = misfit(r);
  fit.tip = {0.0, 0.0};
  fit.direction = {0.0, 1.0};
  if (fit.residual > tol.grim_poor_fit * window_radius)
    raise(Err::poor_fit, "tip does not match a translator profile");
  return fit;
}

double trapezium_lower_bound(Vec2 a, Vec2 b, Vec2 p_minus, Vec2 p_plus) {
  double scale = 0.0;
  for (Vec2 q : {a, b, p_minus, p_plus})
    scale = std::max({scale, std::abs(q.x), std::abs(q.y)});
  const double eps = 1e-9 * std::max(scale, 1.0);
  if (std::abs(a.y - b.y) > eps || std::abs(p_minus.y - p_plus.y) > eps)
    raise(Err::not_trapezium, "parallel sides must be horizontal");
  const double height = std::abs(a.y - p_minus.y);
  if (!(height > 0.0)) raise(Err::not_trapezium, "degenerate height");
  // Convexity of the quadrilateral a-b-p--p+ (in either winding).
  Polyline quad;
  quad.closed = true;
  quad.points = {a, b, p_minus, p_plus};
  Polyline quad2;
  quad2.closed = true;
  quad2.points = {a, b, p_plus, p_minus};
  if (!is_convex(quad) && !is_convex(quad2))
    raise(Err::not_trapezium, "vertices are not a convex quadrilateral");
  return 0.5 * (std::abs(a.x - b.x) + std::abs(p_plus.x - p_minus.x)) * height;
}

// --- blow-down ----------------------------------------------------------------

namespace {

Polyline interp_polyline(const Polyline& a, const Polyline& b, double w) {
  Polyline pa = a, pb = b;
  if (pa.size() != pb.size()) {
    const std::size_t m = std::max(pa.size(), pb.size());
    pa = resample(pa, m);
    pb = resample(pb, m);
  }
  Polyline out;
  out.closed = a.closed;
  out.points.resize(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    out.points[i] = (1.0 - w) * pa.points[i] + w * pb.points[i];
  return out;
}

}  // namespace

std::vector<FlowTrace> blow_down(const FlowTrace& trace,
                                 const std::vector<double>& lambdas,
                                 std::size_t ref_count) {
  trace.validate();
  if (trace.size() < 2)
    raise(Err::invalid_argument, "blow-down needs >= 2 snapshots");
  if (ref_count < 2) raise(Err::invalid_argument, "ref_count >= 2");
  std::vector<FlowTrace> out;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) raise(Err::invalid_argument, "scales must be positive");
    const double t_lo = -2.0 / (lam * lam), t_hi = -1.0 / (lam * lam);
    if (trace.times.front() > t_lo + 1e-9 || trace.times.back() < t_hi - 1e-9)
      raise(Err::window_not_covered,
            "trace does not cover the rescaled reference window");
    FlowTrace r;
    r.ancient = trace.ancient;
    for (std::size_t k = 0; k < ref_count; ++k) {
      const double t_ref =
          -2.0 + 1.0 * double(k) / double(ref_count - 1);  // [-2, -1]
      const double t_src = t_ref / (lam * lam);
      const auto it = std::upper_bound(trace.times.begin(), trace.times.end(),
                                       t_src);
      std::size_t j1 = std::min<std::size_t>(
          std::max<std::ptrdiff_t>(it - trace.times.begin(), 1),
          trace.size() - 1);
      const std::size_t j0 = j1 - 1;
      const double w = std::clamp(
          (t_src - trace.times[j0]) / (trace.times[j1] - trace.times[j0]), 0.0,
          1.0);
      const Polyline pi =
          interp_polyline(snapshot_polyline(trace.snapshots[j0]),
                          snapshot_polyline(trace.snapshots[j1]), w);
      r.times.push_back(t_ref);
      r.snapshots.emplace_back(scale(pi, lam));
    }
    out.push_back(std::move(r));
  }
  return out;
}

const char* to_string(BlowDownKind k) {
  switch (k) {
    case BlowDownKind::circle: return "Circle";
    case BlowDownKind::line_mult1: return "LineMult1";
    case BlowDownKind::line_mult2: return "LineMult2";
    case BlowDownKind::undetermined: return "Undetermined";
  }
  return "unknown";
}

ClassificationVerdict classify_blow_down(const std::vector<FlowTrace>& rescaled,
                                         const std::vector<double>& lambdas,
                                         const Tolerances& tol) {
  if (rescaled.size() != lambdas.size() || rescaled.size() < 3)
    raise(Err::invalid_argument, "need >= 3 rescaled traces");
  const auto [mn, mx] = std::minmax_element(lambdas.begin(), lambdas.end());
  if (*mx / *mn < 10.0 - 1e-12)
    raise(Err::invalid_argument, "scales must span a factor >= 10");

  ClassificationVerdict verdict;
  std::size_t smallest = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const FlowTrace& tr = rescaled[i];
    const double t_ref = tr.times.back();  // -1 by construction
    const double theta =
        gaussian_area(snapshot_polyline(tr.snapshots.back()), t_ref, tol);
    verdict.theta_per_scale.push_back(theta);
    if (lambdas[i] < lambdas[smallest]) smallest = i;
  }
  const double limit = verdict.theta_per_scale[smallest];
  verdict.gaussian_area_limit = limit;

  const Polyline back = snapshot_polyline(rescaled[smallest].snapshots.back());
  verdict.axis = principal_direction(back);

  const double circle_theta = std::sqrt(kTwoPi / std::numbers::e);
  struct Target {
    BlowDownKind kind;
    double value;
  };
  const Target targets[] = {{BlowDownKind::circle, circle_theta},
                            {BlowDownKind::line_mult1, 1.0},
                            {BlowDownKind::line_mult2, 2.0}};
  verdict.kind = BlowDownKind::undetermined;
  verdict.confidence = std::numeric_limits<double>::infinity();
  for (const Target& tg : targets) {
    const double miss = std::abs(limit - tg.value);
    if (miss < tol.theta_verdict && miss < verdict.confidence) {
      verdict.kind = tg.kind;
      verdict.confidence = miss;
    }
  }

  // Ambiguous Gaussian area: fall back to counting branches near the axis.
  if (verdict.kind == BlowDownKind::undetermined && limit > tol.mult_lo &&
      limit < tol.mult_hi) {
    const Vec2 nrm = perp(verdict.axis);
    double lo = 0.0, hi = 0.0;
    for (const Vec2& q : back.points) {
      const double s = dot(q, nrm);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    const double band = 0.25;
    if (lo < -1e-3 && hi > 1e-3 && std::max(hi, -lo) < band) {
      verdict.kind = BlowDownKind::line_mult2;
      verdict.confidence = std::abs(limit - 2.0);
    }
  }
  return verdict;
}

ReflectionReport reflection_defect(const Polyline& p, double alpha) {
  if (!is_convex(p)) raise(Err::not_convex, "reflection needs a convex curve");
  const auto reflect = [&](Vec2 q) { return Vec2{2.0 * alpha - q.x, q.y}; };
  Polyline mirrored = p;
  for (Vec2& q : mirrored.points) q = reflect(q);

  ReflectionReport rep;
  rep.symmetry_defect = hausdorff_distance(p, mirrored);

  // Reflected right part vs the original left part.
  Polyline left, right_reflected;
  left.closed = right_reflected.closed = false;
  for (const Vec2& q : p.points) {
    if (q.x < alpha) left.points.push_back(q);
    if (q.x > alpha) right_reflected.points.push_back(reflect(q));
  }
  if (left.size() < 2 || right_reflected.size() < 2) {
    rep.disjointness_gap = kNaN;
    return rep;
  }
  double gap = std::numeric_limits<double>::infinity();
  for (const Vec2& q : right_reflected.points) {
    const double d = point_polyline_distance(q, left);
    const double signed_d = inside_convex(q, p) ? -d : d;
    gap = std::min(gap, signed_d);
  }
  rep.disjointness_gap = gap;
  return rep;
}

// --- per-snapshot record --------------------------------------------------------

namespace {

std::pair<double, double> snapshot_kappa_range(const Snapshot& s,
                                               const Polyline& poly) {
  if (const auto* sc = std::get_if<SupportCurve>(&s)) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < sc->size(); ++i) {
      const double r = sc->rho(i);
      if (r > 0.0) {
        lo = std::min(lo, 1.0 / r);
        hi = std::max(hi, 1.0 / r);
      }
    }
    return {lo, hi};
  }
  if (const auto* tc = std::get_if<TurningAngleCurve>(&s)) {
    const auto [lo, hi] = std::minmax_element(tc->kappa.begin(),
                                              tc->kappa.end());
    return {*lo, *hi};
  }
  // Discrete estimate on the polyline.
  const std::size_t n = poly.size();
  if (n < 3) return {kNaN, kNaN};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  const std::size_t start = poly.closed ? 0 : 1;
  const std::size_t end = poly.closed ? n : n - 1;
  for (std::size_t i = start; i < end; ++i) {
    const double k = menger_curvature(poly.points[(i + n - 1) % n],
                                      poly.points[i],
                                      poly.points[(i + 1) % n]);
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  return {lo, hi};
}

}  // namespace

DiagnosticsRecord compute_record(const Snapshot& s, double t,
                                 std::size_t polyline_nodes) {
  const Polyline poly = snapshot_polyline(s, polyline_nodes);
  DiagnosticsRecord rec;
  rec.t = t;
  rec.length = poly.length();

  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  double xmin = ymin, xmax = -ymin;
  for (const Vec2& q : poly.points) {
    ymin = std::min(ymin, q.y);
    ymax = std::max(ymax, q.y);
    xmin = std::min(xmin, q.x);
    xmax = std::max(xmax, q.x);
  }
  rec.ell_minus = -ymin;
  rec.ell_plus = ymax;
  rec.width = xmax - xmin;

  if (poly.closed) {
    rec.area = shoelace_area(poly);
    rec.iso_ratio =
        rec.length * rec.length / (4.0 * kPi * std::max(rec.area, 1e-300));
  } else {
    try {
      rec.area = clipped_area_below_axis(poly, 0.0).area;
    } catch (const FlowError&) {
      rec.area = kNaN;
    }
    rec.iso_ratio = kNaN;
  }

  if (t < 0.0) {
    try {
      rec.theta_gauss = gaussian_area(poly, t);
    } catch (const FlowError&) {
      rec.theta_gauss = kNaN;
    }
  } else {
    rec.theta_gauss = kNaN;
  }

  const auto [klo, khi] = snapshot_kappa_range(s, poly);
  rec.kappa_min = klo;
  rec.kappa_max = khi;
  return rec;
}

void fill_diagnostics(FlowTrace& trace, std::size_t polyline_nodes) {
  trace.diagnostics.clear();
  trace.diagnostics.reserve(trace.size());
  for (std::size_t j = 0; j < trace.size(); ++j)
    trace.diagnostics.push_back(
        compute_record(trace.snapshots[j], trace.times[j], polyline_nodes));
}

}  // namespace flowlab
