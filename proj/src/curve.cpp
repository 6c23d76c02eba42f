#include "flowlab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "flowlab/numerics.hpp"

namespace flowlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }

Vec2 normalized(Vec2 v) {
  const double n = norm(v);
  if (n == 0.0) raise(Err::invalid_argument, "cannot normalize zero vector");
  return v / n;
}

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

double Polyline::length() const { return polyline_length(*this); }

Vec2 Polyline::centroid() const {
  if (points.empty()) raise(Err::invalid_argument, "empty polyline");
  Vec2 c{0.0, 0.0};
  for (const Vec2& p : points) c += p;
  return c / double(points.size());
}

// --- SupportCurve -----------------------------------------------------------

double SupportCurve::theta(std::size_t i) const {
  return kTwoPi * double(i) / double(h.size());
}

double SupportCurve::dtheta() const { return kTwoPi / double(h.size()); }

double SupportCurve::rho(std::size_t i) const {
  const std::size_t n = h.size();
  const double dt = dtheta();
  const double hm = h[(i + n - 1) % n], hp = h[(i + 1) % n];
  return (hp - 2.0 * h[i] + hm) / (dt * dt) + h[i];
}

double SupportCurve::min_rho() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i) m = std::min(m, rho(i));
  return m;
}

void SupportCurve::validate() const {
  const std::size_t n = h.size();
  if (n < 16 || (n & (n - 1)) != 0)
    raise(Err::not_convex, "support grid must have >= 16 nodes, power of two");
  if (min_rho() <= 0.0)
    raise(Err::not_convex, "support function is not strictly convex");
}

double SupportCurve::extent(Vec2 u) const {
  // h(theta) is the support in direction u(theta); the extent along u is
  // h(angle(u)) + h(angle(-u)), interpolated on the grid.
  const auto support_at = [&](double ang) {
    const std::size_t n = h.size();
    double s = ang / dtheta();
    s -= std::floor(s / double(n)) * double(n);
    const std::size_t i = std::size_t(s) % n;
    const double f = s - std::floor(s);
    return (1.0 - f) * h[i] + f * h[(i + 1) % n];
  };
  const double ang = std::atan2(u.y, u.x);
  return support_at(ang) + support_at(ang + kPi);
}

// --- TurningAngleCurve ------------------------------------------------------

double TurningAngleCurve::dtheta() const {
  if (theta.size() < 2) raise(Err::invalid_argument, "turning grid too small");
  return theta[1] - theta[0];
}

double TurningAngleCurve::closure_residual() const {
  const std::size_t n = theta.size();
  double sx = 0.0, sy = 0.0, len = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 1.0 / kappa[i];
    sx += u * std::cos(theta[i]);
    sy += u * std::sin(theta[i]);
    len += u;
  }
  const double dt = dtheta();
  return std::hypot(sx, sy) * dt / std::max(len * dt, 1e-300);
}

void TurningAngleCurve::validate() const {
  if (theta.size() != kappa.size() || theta.size() < 8)
    raise(Err::invalid_argument, "turning-angle grid mismatch");
  for (double k : kappa)
    if (!(k > 0.0)) raise(Err::not_convex, "kappa must be positive");
  if (!closed) {
    const double range = theta.back() - theta.front();
    if (range > kPi + 1e-9)
      raise(Err::invalid_argument, "open Gauss range exceeds pi");
  }
}

// --- GraphCurve -------------------------------------------------------------

double GraphCurve::dy() const {
  if (v.size() < 2) raise(Err::invalid_argument, "graph grid too small");
  return (y_hi - y_lo) / double(v.size() - 1);
}

double GraphCurve::y(std::size_t i) const { return y_lo + double(i) * dy(); }

Vec2 GraphCurve::point(std::size_t i) const { return {-v[i], y(i)}; }

Polyline GraphCurve::polyline() const {
  Polyline p;
  p.points.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p.points.push_back(point(i));
  return p;
}

// --- primitives -------------------------------------------------------------

double polyline_length(const Polyline& p) {
  const std::size_t n = p.size();
  if (n < 2) return 0.0;
  double len = 0.0;
  const std::size_t m = p.closed ? n : n - 1;
  for (std::size_t i = 0; i < m; ++i)
    len += norm(p.points[(i + 1) % n] - p.points[i]);
  return len;
}

double shoelace_area(const Polyline& p) {
  if (!p.closed) raise(Err::not_closed, "area needs a closed polyline");
  const std::size_t n = p.size();
  if (n < 3) raise(Err::invalid_argument, "closed polyline needs >= 3 points");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += cross(p.points[i], p.points[(i + 1) % n]);
  return 0.5 * std::abs(s);
}

bool is_convex(const Polyline& p, double tol_rel) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  std::vector<double> crosses;
  crosses.reserve(n);
  const std::size_t m = p.closed ? n : n - 2;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = p.points[i];
    const Vec2 b = p.points[(i + 1) % n];
    const Vec2 c = p.points[(i + 2) % n];
    crosses.push_back(cross(b - a, c - b));
  }
  double amax = 0.0;
  for (double c : crosses) amax = std::max(amax, std::abs(c));
  if (amax == 0.0) return true;  // collinear
  const double tol = tol_rel * amax;
  bool pos = false, neg = false;
  for (double c : crosses) {
    if (c > tol) pos = true;
    if (c < -tol) neg = true;
  }
  return !(pos && neg);
}

double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = norm2(d);
  if (len2 == 0.0) return norm(q - a);
  const double s = std::clamp(dot(q - a, d) / len2, 0.0, 1.0);
  return norm(q - (a + s * d));
}

double point_polyline_distance(Vec2 q, const Polyline& p) {
  const std::size_t n = p.size();
  if (n == 0) raise(Err::invalid_argument, "empty polyline");
  if (n == 1) return norm(q - p.points[0]);
  double best = std::numeric_limits<double>::infinity();
  const std::size_t m = p.closed ? n : n - 1;
  for (std::size_t i = 0; i < m; ++i)
    best = std::min(best, point_segment_distance(q, p.points[i],
                                                 p.points[(i + 1) % n]));
  return best;
}

bool inside_convex(Vec2 q, const Polyline& p) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  const std::size_t m = p.closed ? n : n - 1;
  // Counterclockwise boundary: inside means strictly left of every edge.
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = p.points[i], b = p.points[(i + 1) % n];
    if (cross(b - a, q - a) <= 0.0) return false;
  }
  return true;
}

Polyline resample(const Polyline& p, std::size_t m) {
  const std::size_t n = p.size();
  if (n < 2 || m < 2) raise(Err::invalid_argument, "resample needs >= 2 pts");
  std::vector<double> s(1, 0.0);
  const std::size_t edges = p.closed ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i)
    s.push_back(s.back() + norm(p.points[(i + 1) % n] - p.points[i]));
  const double total = s.back();
  if (total == 0.0) raise(Err::invalid_argument, "degenerate polyline");
  Polyline out;
  out.closed = p.closed;
  out.points.reserve(m);
  const double step = p.closed ? total / double(m) : total / double(m - 1);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double target = std::min(double(k) * step, total);
    while (seg + 1 < s.size() - 1 && s[seg + 1] < target) ++seg;
    const double w = (s[seg + 1] > s[seg])
                         ? (target - s[seg]) / (s[seg + 1] - s[seg])
                         : 0.0;
    const Vec2 a = p.points[seg % n], b = p.points[(seg + 1) % n];
    out.points.push_back(a + w * (b - a));
  }
  return out;
}

Polyline translate(const Polyline& p, Vec2 delta) {
  Polyline out = p;
  for (Vec2& q : out.points) q += delta;
  return out;
}

Polyline rotate(const Polyline& p, double angle) {
  Polyline out = p;
  for (Vec2& q : out.points) q = rotate(q, angle);
  return out;
}

Polyline scale(const Polyline& p, double factor) {
  Polyline out = p;
  for (Vec2& q : out.points) q = q * factor;
  return out;
}

double menger_curvature(Vec2 a, Vec2 b, Vec2 c) {
  const double la = norm(b - a), lb = norm(c - b), lc = norm(a - c);
  const double denom = la * lb * lc;
  if (denom == 0.0) return 0.0;
  return 2.0 * std::abs(cross(b - a, c - b)) / denom;
}

// --- reconstruct_positions --------------------------------------------------

namespace {

// Remove the cos/sin components of u = 1/kappa on the closed uniform grid,
// the minimal-norm repair of the closure conditions.
void closure_project(const std::vector<double>& theta, std::vector<double>& u) {
  const std::size_t n = u.size();
  double sc = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sc += u[i] * std::cos(theta[i]);
    ss += u[i] * std::sin(theta[i]);
  }
  const double a = 2.0 * sc / double(n), b = 2.0 * ss / double(n);
  for (std::size_t i = 0; i < n; ++i)
    u[i] -= a * std::cos(theta[i]) + b * std::sin(theta[i]);
}

// Antiderivative of a periodic function sampled on n uniform nodes,
// evaluated at the nodes, via its discrete Fourier series: exact for
// band-limited data, spectrally accurate for smooth data. G(0) = 0.
std::vector<double> periodic_antiderivative(const std::vector<double>& g,
                                            double period) {
  const std::size_t n = g.size();
  std::vector<std::complex<double>> a(g.begin(), g.end());
  if ((n & (n - 1)) == 0) {
    fft(a, false);
  } else {
    // Direct DFT fallback for grids that are not a power of two.
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        const double ang = -kTwoPi * double(k) * double(j) / double(n);
        s += g[j] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      out[k] = s;
    }
    a = std::move(out);
  }
  const double mean = a[0].real() / double(n);
  // Integrate mode k: divide by i * k * (2 pi / period).
  std::vector<std::complex<double>> b(n, {0.0, 0.0});
  for (std::size_t k = 1; k < n; ++k) {
    const double freq =
        (k <= n / 2) ? double(k) : double(k) - double(n);  // signed mode
    if (2 * k == n) continue;  // Nyquist mode has no smooth antiderivative
    b[k] = a[k] / std::complex<double>(0.0, freq * kTwoPi / period);
  }
  if ((n & (n - 1)) == 0) {
    fft(b, true);
  } else {
    std::vector<std::complex<double>> out(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) {
        const double ang = kTwoPi * double(k) * double(j) / double(n);
        s += b[k] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      out[j] = s / double(n);
    }
    b = std::move(out);
  }
  std::vector<double> G(n);
  const double dt = period / double(n);
  for (std::size_t j = 0; j < n; ++j)
    G[j] = mean * (double(j) * dt) + (b[j].real() - b[0].real());
  return G;
}

}  // namespace

Polyline reconstruct_positions(const TurningAngleCurve& c) {
  c.validate();
  const std::size_t n = c.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = 1.0 / c.kappa[i];

  Polyline out;
  out.closed = c.closed;
  out.points.resize(n);

  if (c.closed) {
    // Gap of the raw quadrature = the full-period sums of u*cos, u*sin.
    double gx = 0.0, gy = 0.0, len = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gx += u[i] * std::cos(c.theta[i]);
      gy += u[i] * std::sin(c.theta[i]);
      len += u[i];
    }
    if (std::hypot(gx, gy) > 1e-5 * len)
      raise(Err::closure_violation, "endpoint gap exceeds 1e-5 of length");
    closure_project(c.theta, u);
    std::vector<double> fx(n), fy(n);
    for (std::size_t i = 0; i < n; ++i) {
      fx[i] = u[i] * std::cos(c.theta[i]);
      fy[i] = u[i] * std::sin(c.theta[i]);
    }
    const std::vector<double> X = periodic_antiderivative(fx, kTwoPi);
    const std::vector<double> Y = periodic_antiderivative(fy, kTwoPi);
    for (std::size_t i = 0; i < n; ++i)
      out.points[i] = c.base_point + Vec2{X[i], Y[i]};
  } else {
    Vec2 acc{0.0, 0.0};
    out.points[0] = c.base_point;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dt = c.theta[i + 1] - c.theta[i];
      const Vec2 fi{u[i] * std::cos(c.theta[i]), u[i] * std::sin(c.theta[i])};
      const Vec2 fj{u[i + 1] * std::cos(c.theta[i + 1]),
                    u[i + 1] * std::sin(c.theta[i + 1])};
      acc += 0.5 * dt * (fi + fj);
      out.points[i + 1] = c.base_point + acc;
    }
  }
  return out;
}

// --- support_from_polyline --------------------------------------------------

SupportCurve support_from_polyline(const Polyline& p, std::size_t n,
                                   std::optional<Vec2> center) {
  if (!p.closed) raise(Err::not_closed, "support needs a closed polyline");
  if (!is_convex(p)) raise(Err::not_convex, "polyline is not convex");
  if (n < 16 || (n & (n - 1)) != 0)
    raise(Err::invalid_argument, "support grid must be a power of two >= 16");
  SupportCurve s;
  s.center = center.value_or(p.centroid());
  s.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = kTwoPi * double(i) / double(n);
    const Vec2 u{std::cos(th), std::sin(th)};
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& q : p.points) best = std::max(best, dot(q - s.center, u));
    s.h[i] = best;
  }
  if (s.min_rho() <= 0.0)
    raise(Err::not_convex, "support function has nonpositive curvature radius");
  return s;
}

Polyline polyline_from_support(const SupportCurve& s) {
  const std::size_t n = s.size();
  if (n < 3) raise(Err::invalid_argument, "support grid too small");
  Polyline p;
  p.closed = true;
  p.points.resize(n);
  const double dt = s.dtheta();
  for (std::size_t i = 0; i < n; ++i) {
    const double th = s.theta(i);
    const double hth = (s.h[(i + 1) % n] - s.h[(i + n - 1) % n]) / (2.0 * dt);
    const Vec2 u{std::cos(th), std::sin(th)};
    p.points[i] = s.center + s.h[i] * u + hth * perp(u);
  }
  return p;
}

// --- split_graphs -----------------------------------------------------------

namespace {

// x-values of a convex chain sampled at the ordinates `ys` (the chain is
// monotone in y).
std::vector<double> chain_abscissae(const std::vector<Vec2>& chain,
                                    const std::vector<double>& ys) {
  std::vector<double> out(ys.size());
  std::size_t seg = 0;
  const bool increasing = chain.back().y >= chain.front().y;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double y = ys[k];
    while (seg + 2 < chain.size()) {
      const double y1 = chain[seg + 1].y;
      const bool covered = increasing ? (y <= y1) : (y >= y1);
      if (covered) break;
      ++seg;
    }
    const Vec2 a = chain[seg], b = chain[seg + 1];
    const double w = (b.y != a.y) ? (y - a.y) / (b.y - a.y) : 0.5;
    out[k] = a.x + std::clamp(w, 0.0, 1.0) * (b.x - a.x);
  }
  return out;
}

}  // namespace

std::pair<GraphCurve, GraphCurve> split_graphs(const Polyline& p,
                                               std::size_t n) {
  if (!p.closed) raise(Err::not_closed, "split_graphs needs a closed curve");
  if (!is_convex(p)) raise(Err::not_convex, "split_graphs needs convexity");
  if (n < 3) raise(Err::invalid_argument, "graph grid too small");
  const std::size_t m = p.size();
  std::size_t imin = 0, imax = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (p.points[i].y < p.points[imin].y) imin = i;
    if (p.points[i].y > p.points[imax].y) imax = i;
  }
  const double a_minus = p.points[imin].y, a_plus = p.points[imax].y;
  if (!(a_plus > a_minus))
    raise(Err::invalid_argument, "degenerate vertical extent");

  // Counterclockwise from the bottom vertex: first the right chain up to
  // the top, then the left chain back down.
  std::vector<Vec2> right, left;
  for (std::size_t i = imin;; i = (i + 1) % m) {
    right.push_back(p.points[i]);
    if (i == imax) break;
  }
  for (std::size_t i = imax;; i = (i + 1) % m) {
    left.push_back(p.points[i]);
    if (i == imin) break;
  }

  std::vector<double> ys(n);
  for (std::size_t k = 0; k < n; ++k)
    ys[k] = a_minus + (a_plus - a_minus) * double(k) / double(n - 1);

  const std::vector<double> xr = chain_abscissae(right, ys);
  std::vector<double> ys_desc(ys.rbegin(), ys.rend());
  std::vector<double> xl_desc = chain_abscissae(left, ys_desc);
  std::vector<double> xl(xl_desc.rbegin(), xl_desc.rend());

  GraphCurve plus, minus;
  plus.side = GraphSide::plus;
  minus.side = GraphSide::minus;
  plus.y_lo = minus.y_lo = a_minus;
  plus.y_hi = minus.y_hi = a_plus;
  plus.v.resize(n);
  minus.v.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    plus.v[k] = -xr[k];   // right boundary, convex in y
    minus.v[k] = -xl[k];  // left boundary, concave in y
  }
  return {plus, minus};
}

// --- hausdorff --------------------------------------------------------------

namespace {

double directed_hausdorff(const Polyline& a, const Polyline& b) {
  double worst = 0.0;
  for (const Vec2& q : a.points)
    worst = std::max(worst, point_polyline_distance(q, b));
  return worst;
}

}  // namespace

double hausdorff_distance(const Polyline& a, const Polyline& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace flowlab
