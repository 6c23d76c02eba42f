#include "flowlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flowlab/errors.hpp"

namespace flowlab {

std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n), x(n);
  c[0] = upper[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * c[i - 1];
    c[i] = (i + 1 < n) ? upper[i] / m : 0.0;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (n < 3) raise(Err::invalid_argument, "cyclic system needs n >= 3");
  // Sherman-Morrison: A = B + u v^T with u = (gamma, 0, .., 0, lower[0]'..)
  const double alpha = lower[0];    // couples x0 to x_{n-1}
  const double beta = upper[n - 1]; // couples x_{n-1} to x0
  const double gamma = -diag[0];
  std::vector<double> d2(diag.begin(), diag.end());
  d2[0] -= gamma;
  d2[n - 1] -= alpha * beta / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = beta;
  std::vector<double> v(n, 0.0);
  v[0] = 1.0;
  v[n - 1] = alpha / gamma;

  std::span<const double> d2s(d2);
  std::vector<double> y = solve_tridiagonal(lower, d2s, upper, rhs);
  std::vector<double> q = solve_tridiagonal(lower, d2s, upper, u);
  const double vy = v[0] * y[0] + v[n - 1] * y[n - 1];
  const double vq = v[0] * q[0] + v[n - 1] * q[n - 1];
  const double factor = vy / (1.0 + vq);
  for (std::size_t i = 0; i < n; ++i) y[i] -= factor * q[i];
  return y;
}

double golden_minimize(const std::function<double(double)>& f, double a,
                       double b, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double erf_diff(double a, double b) {
  if (a > b) return -erf_diff(b, a);
  if (a >= 0.0) return std::erfc(a) - std::erfc(b);
  if (b <= 0.0) return std::erfc(-b) - std::erfc(-a);
  return std::erf(b) - std::erf(a);
}

namespace {

double segment_gaussian(Vec2 a, Vec2 b, double tau, double floor) {
  const Vec2 d = b - a;
  const double len = norm(d);
  if (len == 0.0) return 0.0;
  const Vec2 u = d / len;
  const double s0 = dot(a, u);               // signed start along the line
  const double dperp2 = norm2(a) - s0 * s0;
  // Nearest squared distance from the segment to the origin.
  const double sc = std::clamp(-s0, 0.0, len);
  const double near2 = dperp2 + (s0 + sc) * (s0 + sc);
  if (std::exp(-near2 / tau) < floor) return 0.0;
  const double rt = std::sqrt(tau);
  return 0.5 * std::exp(-std::max(dperp2, 0.0) / tau) *
         erf_diff(s0 / rt, (s0 + len) / rt);
}

}  // namespace

double gaussian_weighted_length(const Polyline& p, double tau) {
  if (tau <= 0.0) raise(Err::invalid_argument, "gaussian scale must be > 0");
  const std::size_t n = p.size();
  if (n < 2) return 0.0;
  constexpr double floor = 1e-16;
  double sum = 0.0;
  const std::size_t m = p.closed ? n : n - 1;
  for (std::size_t i = 0; i < m; ++i)
    sum += segment_gaussian(p.points[i], p.points[(i + 1) % n], tau, floor);
  return sum;
}

double endpoint_gaussian_weight(const Polyline& p, double tau) {
  if (p.closed || p.size() == 0) return 0.0;
  const double w0 = std::exp(-norm2(p.points.front()) / tau);
  const double w1 = std::exp(-norm2(p.points.back()) / tau);
  return std::max(w0, w1);
}

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    raise(Err::invalid_argument, "fft size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        2.0 * std::numbers::pi / double(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& z : a) z /= double(n);
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) raise(Err::invalid_argument, "ls_slope inputs");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) raise(Err::invalid_argument, "degenerate abscissae");
  return sxy / sxx;
}

Vec2 principal_direction(const Polyline& p) {
  const std::size_t n = p.size();
  if (n < 2) raise(Err::invalid_argument, "principal_direction needs a curve");
  const std::size_t m = p.closed ? n : n - 1;
  double sw = 0.0;
  Vec2 mean{0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = p.points[i], b = p.points[(i + 1) % n];
    const double w = norm(b - a);
    mean += 0.5 * (a + b) * w;
    sw += w;
  }
  mean = mean / sw;
  double xx = 0.0, xy = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = p.points[i], b = p.points[(i + 1) % n];
    const double w = norm(b - a);
    const Vec2 c = 0.5 * (a + b) - mean;
    xx += w * c.x * c.x;
    xy += w * c.x * c.y;
    yy += w * c.y * c.y;
  }
  // Eigenvector of [[xx,xy],[xy,yy]] for the larger eigenvalue.
  const double tr = xx + yy;
  const double det = xx * yy - xy * xy;
  const double lam = 0.5 * tr + std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
  Vec2 v{xy, lam - xx};
  if (norm(v) < 1e-300) v = (xx >= yy) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  return normalized(v);
}

}  // namespace flowlab
