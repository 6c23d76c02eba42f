#include "flowlab/evolver.hpp"
#include <string>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "flowlab/numerics.hpp"

namespace flowlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::explicit_euler: return "explicit";
    case Scheme::semi_implicit: return "semi_implicit";
  }
  return "unknown";
}

void StepControl::validate() const {
  if (!(dt_max > 0.0)) raise(Err::invalid_argument, "dt_max must be positive");
  if (scheme == Scheme::explicit_euler && !(cfl > 0.0 && cfl <= 0.5))
    raise(Err::invalid_argument, "explicit scheme needs 0 < cfl <= 0.5");
  for (std::size_t i = 1; i < t_grid_output.size(); ++i)
    if (!(t_grid_output[i] > t_grid_output[i - 1]))
      raise(Err::invalid_argument, "output times must strictly increase");
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) raise(Err::invalid_argument, "linspace needs n >= 2");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * double(i) / double(n - 1);
  out.back() = b;
  return out;
}

std::vector<double> logspace_times(double t_start, double t_end,
                                   std::size_t n) {
  if (!(t_start < t_end && t_end < 0.0))
    raise(Err::invalid_argument, "logspace_times needs t_start < t_end < 0");
  const std::vector<double> ls =
      linspace(std::log(-t_start), std::log(-t_end), n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = -std::exp(ls[i]);
  out.front() = t_start;
  out.back() = t_end;
  return out;
}

namespace {

std::vector<double> output_grid(const TimeWindow& w, const StepControl& ctl) {
  w.validate();
  ctl.validate();
  if (ctl.t_grid_output.empty()) return linspace(w.t_start, w.t_end, 33);
  if (ctl.t_grid_output.front() < w.t_start - 1e-12 ||
      ctl.t_grid_output.back() > w.t_end + 1e-12)
    raise(Err::invalid_argument, "output times outside the window");
  return ctl.t_grid_output;
}

// Drives a time stepper through the window, emitting snapshots exactly at
// the output times. step(dt) advances the state; stop() reports
// extinction; emit(t) records a snapshot.
template <class Step, class Stop, class Emit, class StableDt>
TraceStatus run_steps(const std::vector<double>& outputs, double t_start,
                      const StepControl& ctl, Step step, Stop stop, Emit emit,
                      StableDt stable_dt) {
  double t = t_start;
  const double tiny = 1e-12 * std::max(1.0, std::abs(outputs.back()));
  for (double target : outputs) {
    while (t < target - tiny) {
      if (stop()) return TraceStatus::extinction_reached;
      double dt = std::min(ctl.dt_max, target - t);
      if (ctl.scheme == Scheme::explicit_euler)
        dt = std::min(dt, ctl.cfl * stable_dt());
      if (!(dt > 0.0)) raise(Err::invalid_argument, "nonpositive time step");
      if (t + dt > target - tiny) dt = target - t;  // land exactly
      step(dt);
      t += dt;
      if (t > target - tiny) t = target;
    }
    if (stop()) return TraceStatus::extinction_reached;
    emit(target);
  }
  return TraceStatus::completed;
}

std::vector<double> rho_of(const std::vector<double>& h, double dtheta) {
  const std::size_t n = h.size();
  std::vector<double> rho(n);
  const double inv = 1.0 / (dtheta * dtheta);
  for (std::size_t i = 0; i < n; ++i) {
    const double hm = h[(i + n - 1) % n], hp = h[(i + 1) % n];
    rho[i] = (hp - 2.0 * h[i] + hm) * inv + h[i];
  }
  return rho;
}

}  // namespace

FlowTrace evolve_support(const SupportCurve& h0, const TimeWindow& window,
                         const StepControl& ctl) {
  h0.validate();
  const std::vector<double> outputs = output_grid(window, ctl);
  const std::size_t n = h0.size();
  const double dtheta = kTwoPi / double(n);

  std::vector<double> h = h0.h;
  double rho_bar0 = 0.0;
  {
    const std::vector<double> r0 = rho_of(h, dtheta);
    for (double r : r0) rho_bar0 += r;
    rho_bar0 /= double(n);
  }
  const double rho_floor = 1e-6 * rho_bar0;

  FlowTrace trace;
  double min_rho_cache = 0.0;
  const auto refresh = [&](const std::vector<double>& hh) {
    const std::vector<double> r = rho_of(hh, dtheta);
    min_rho_cache = *std::min_element(r.begin(), r.end());
    return r;
  };
  refresh(h);

  const auto step = [&](double dt) {
    const std::vector<double> r1 = rho_of(h, dtheta);
    for (double r : r1)
      if (!(r > 0.0)) raise(Err::convexity_lost, "support flow unstable");
    if (ctl.scheme == Scheme::explicit_euler) {
      // Heun: second order in time, same stability class as forward Euler.
      std::vector<double> hstar(n);
      for (std::size_t i = 0; i < n; ++i) hstar[i] = h[i] - dt / r1[i];
      const std::vector<double> r2 = rho_of(hstar, dtheta);
      for (std::size_t i = 0; i < n; ++i) {
        if (!(r2[i] > 0.0))
          raise(Err::convexity_lost, "support flow unstable");
        h[i] -= 0.5 * dt * (1.0 / r1[i] + 1.0 / r2[i]);
      }
    } else {
      // Linearize 1/rho about the previous step:
      //   (I - dt W (D^2 + I)) h_new = h - 2 dt / rho,  W = diag(1/rho^2).
      std::vector<double> lower(n), diag(n), upper(n), rhs(n);
      const double inv = 1.0 / (dtheta * dtheta);
      for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 / (r1[i] * r1[i]);
        lower[i] = -dt * w * inv;
        upper[i] = -dt * w * inv;
        diag[i] = 1.0 + dt * w * (2.0 * inv - 1.0);
        rhs[i] = h[i] - 2.0 * dt / r1[i];
      }
      h = solve_cyclic_tridiagonal(lower, diag, upper, rhs);
    }
    refresh(h);
  };
  const auto stop = [&]() { return min_rho_cache < rho_floor; };
  const auto emit = [&](double t) {
    SupportCurve s;
    s.h = h;
    s.center = h0.center;
    trace.times.push_back(t);
    trace.snapshots.emplace_back(std::move(s));
  };
  const auto stable_dt = [&]() {
    return dtheta * dtheta * min_rho_cache * min_rho_cache;
  };

  trace.status =
      run_steps(outputs, window.t_start, ctl, step, stop, emit, stable_dt);
  trace.validate();
  return trace;
}

FlowTrace evolve_kappa(const TurningAngleCurve& c0, const TimeWindow& window,
                       const StepControl& ctl) {
  c0.validate();
  if (!c0.closed)
    raise(Err::invalid_argument, "turning-angle flow needs a closed curve");
  const std::vector<double> outputs = output_grid(window, ctl);
  const std::size_t n = c0.size();
  const double dtheta = c0.dtheta();

  std::vector<double> kappa = c0.kappa;
  Vec2 base = c0.base_point;
  double rho_bar0 = 0.0;
  for (double k : kappa) rho_bar0 += 1.0 / k;
  rho_bar0 /= double(n);
  const double kappa_ceiling = 1.0 / (1e-6 * rho_bar0);

  const auto rhs = [&](const std::vector<double>& k, std::vector<double>& out) {
    const double inv = 1.0 / (dtheta * dtheta);
    for (std::size_t i = 0; i < n; ++i) {
      const double km = k[(i + n - 1) % n], kp = k[(i + 1) % n];
      const double lap = (kp - 2.0 * k[i] + km) * inv;
      out[i] = k[i] * k[i] * lap + k[i] * k[i] * k[i];
    }
  };
  // Gauge velocity of the theta = theta0 point: kappa N - kappa_theta T.
  const auto base_velocity = [&](const std::vector<double>& k) {
    const double th = c0.theta[0];
    const double kth = (k[1] - k[n - 1]) / (2.0 * dtheta);
    const Vec2 tangent{std::cos(th), std::sin(th)};
    const Vec2 normal{-std::sin(th), std::cos(th)};
    return k[0] * normal - kth * tangent;
  };
  const auto project = [&](std::vector<double>& k) {
    std::vector<double> u(n);
    double len = 0.0, gx = 0.0, gy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = 1.0 / k[i];
      len += u[i];
      gx += u[i] * std::cos(c0.theta[i]);
      gy += u[i] * std::sin(c0.theta[i]);
    }
    if (std::hypot(gx, gy) > 1e-5 * len)
      raise(Err::closure_violation, "closure drift exceeded 1e-5");
    const double a = 2.0 * gx / double(n), b = 2.0 * gy / double(n);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] -= a * std::cos(c0.theta[i]) + b * std::sin(c0.theta[i]);
      if (!(u[i] > 0.0)) raise(Err::convexity_lost, "curvature blew up");
      k[i] = 1.0 / u[i];
    }
  };

  FlowTrace trace;
  std::vector<double> f1(n), f2(n), kstar(n);
  const auto step = [&](double dt) {
    if (ctl.scheme == Scheme::explicit_euler) {
      rhs(kappa, f1);
      const Vec2 v1 = base_velocity(kappa);
      for (std::size_t i = 0; i < n; ++i) {
        kstar[i] = kappa[i] + dt * f1[i];
        if (!(kstar[i] > 0.0)) raise(Err::convexity_lost, "kappa <= 0");
      }
      rhs(kstar, f2);
      const Vec2 v2 = base_velocity(kstar);
      for (std::size_t i = 0; i < n; ++i) {
        kappa[i] += 0.5 * dt * (f1[i] + f2[i]);
        if (!(kappa[i] > 0.0)) raise(Err::convexity_lost, "kappa <= 0");
      }
      base += 0.5 * dt * (v1 + v2);
    } else {
      // (I - dt kappa^2 D^2) kappa_new = kappa + dt kappa^3.
      std::vector<double> lower(n), diag(n), upper(n), b(n);
      const double inv = 1.0 / (dtheta * dtheta);
      for (std::size_t i = 0; i < n; ++i) {
        const double k2 = kappa[i] * kappa[i];
        lower[i] = -dt * k2 * inv;
        upper[i] = -dt * k2 * inv;
        diag[i] = 1.0 + 2.0 * dt * k2 * inv;
        b[i] = kappa[i] + dt * k2 * kappa[i];
      }
      const Vec2 v1 = base_velocity(kappa);
      kappa = solve_cyclic_tridiagonal(lower, diag, upper, b);
      for (double k : kappa)
        if (!(k > 0.0)) raise(Err::convexity_lost, "kappa <= 0");
      base += dt * v1;
    }
    project(kappa);
  };
  const auto stop = [&]() {
    return *std::max_element(kappa.begin(), kappa.end()) > kappa_ceiling;
  };
  const auto emit = [&](double t) {
    TurningAngleCurve c;
    c.theta = c0.theta;
    c.kappa = kappa;
    c.base_point = base;
    c.closed = true;
    trace.times.push_back(t);
    trace.snapshots.emplace_back(std::move(c));
  };
  const auto stable_dt = [&]() {
    const double kmax = *std::max_element(kappa.begin(), kappa.end());
    return dtheta * dtheta / (kmax * kmax);
  };

  trace.status =
      run_steps(outputs, window.t_start, ctl, step, stop, emit, stable_dt);
  trace.validate();
  return trace;
}

// --- graph flow --------------------------------------------------------------

namespace {

struct QuadFit {
  double c2, c1, c0;  // y = c2 x^2 + c1 x + c0

  double vertex_x() const { return -c1 / (2.0 * c2); }
  double vertex_y() const { return c0 - c1 * c1 / (4.0 * c2); }
};

QuadFit fit_quadratic(Vec2 p0, Vec2 p1, Vec2 p2) {
  // Divided differences on distinct abscissae.
  const double d01 = (p1.y - p0.y) / (p1.x - p0.x);
  const double d12 = (p2.y - p1.y) / (p2.x - p1.x);
  const double c2 = (d12 - d01) / (p2.x - p0.x);
  const double c1 = d01 - c2 * (p0.x + p1.x);
  const double c0 = p0.y - c2 * p0.x * p0.x - c1 * p0.x;
  return {c2, c1, c0};
}

// x with q(x) = y on the branch containing x_near.
double quad_solve_branch(const QuadFit& q, double y, double x_near) {
  if (std::abs(q.c2) < 1e-14) {
    return (y - q.c0) / q.c1;
  }
  const double xv = q.vertex_x();
  const double disc = std::max((y - q.vertex_y()) / q.c2, 0.0);
  const double root = std::sqrt(disc);
  return (x_near >= xv) ? xv + root : xv - root;
}

}  // namespace

FlowTrace evolve_graph(const GraphCurve& g0, const TimeWindow& window,
                       const StepControl& ctl, GraphBoundary bc) {
  if (g0.size() < 8) raise(Err::invalid_argument, "graph grid too small");
  const std::vector<double> outputs = output_grid(window, ctl);
  const double dy = g0.dy();

  std::vector<double> v = g0.v;
  long ilo = 0, ihi = long(v.size()) - 1;
  const auto y_at = [&](long i) { return g0.y_lo + double(i) * dy; };

  const double vy_bound = 1e6;

  FlowTrace trace;
  bool extinct = false;

  // Swapped-frame quadratic (y as a function of x = -v) through the three
  // nodes i, i-2, i-4 counted from an end; its vertex is the vertical
  // tangency point and 2|c2| the curvature there.
  const auto cap_fit = [&](bool top) {
    const long i = top ? ihi : ilo;
    const long s = top ? -1 : 1;
    return fit_quadratic({-v[i], y_at(i)}, {-v[i + 2 * s], y_at(i + 2 * s)},
                         {-v[i + 4 * s], y_at(i + 4 * s)});
  };

  const auto step = [&](double dt) {
    QuadFit top_fit{}, bot_fit{};
    double top_cap = 0.0, bot_cap = 0.0;
    bool top_is_cap = false, bot_is_cap = false;
    if (bc == GraphBoundary::free_vertical_tangent) {
      if (ihi - ilo < 10) {
        extinct = true;
        return;
      }
      // New cap positions: the fitted vertices move inward at their
      // curvature speed.
      top_fit = cap_fit(true);
      bot_fit = cap_fit(false);
      top_is_cap = top_fit.c2 < -1e-12;
      bot_is_cap = bot_fit.c2 > 1e-12;
      top_cap = top_is_cap ? top_fit.vertex_y() - 2.0 * (-top_fit.c2) * dt
                           : std::numeric_limits<double>::infinity();
      bot_cap = bot_is_cap ? bot_fit.vertex_y() + 2.0 * bot_fit.c2 * dt
                           : -std::numeric_limits<double>::infinity();
      while (ihi > ilo + 6 && y_at(ihi) > top_cap - 0.75 * dy) --ihi;
      while (ihi > ilo + 6 && y_at(ilo) < bot_cap + 0.75 * dy) ++ilo;
      if (ihi - ilo < 10) {
        extinct = true;
        return;
      }
    }
    // Finite-difference band: everything except the two nodes nearest each
    // free cap (those are re-assigned from the shifted parabola).
    const long a = (bc == GraphBoundary::fixed_ends) ? ilo + 1
                   : top_is_cap || bot_is_cap      ? ilo + 2
                                                   : ilo + 1;
    const long b = (bc == GraphBoundary::fixed_ends) ? ihi - 1
                   : top_is_cap || bot_is_cap      ? ihi - 2
                                                   : ihi - 1;
    if (ctl.scheme == Scheme::explicit_euler) {
      std::vector<double> vnew(v);
      for (long i = a; i <= b; ++i) {
        const double vy_i = (v[i + 1] - v[i - 1]) / (2.0 * dy);
        if (std::abs(vy_i) > vy_bound)
          raise(Err::branch_degenerate, "graph slope exceeded bound");
        const double vyy = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dy * dy);
        vnew[i] = v[i] + dt * vyy / (1.0 + vy_i * vy_i);
      }
      v.swap(vnew);
    } else {
      const std::size_t m = std::size_t(b - a + 1);
      std::vector<double> lower(m), diag(m), upper(m), rhsv(m);
      const double inv = 1.0 / (dy * dy);
      for (long i = a; i <= b; ++i) {
        const double vy_i = (v[i + 1] - v[i - 1]) / (2.0 * dy);
        if (std::abs(vy_i) > vy_bound)
          raise(Err::branch_degenerate, "graph slope exceeded bound");
        const double w = dt * inv / (1.0 + vy_i * vy_i);
        const std::size_t r = std::size_t(i - a);
        lower[r] = -w;
        upper[r] = -w;
        diag[r] = 1.0 + 2.0 * w;
        rhsv[r] = v[i];
        if (i == a) rhsv[r] += w * v[i - 1];
        if (i == b) rhsv[r] += w * v[i + 1];
      }
      const std::vector<double> sol =
          solve_tridiagonal(lower, diag, upper, rhsv);
      for (std::size_t r = 0; r < m; ++r) v[std::size_t(a) + r] = sol[r];
    }
    if (bc == GraphBoundary::free_vertical_tangent) {
      if (top_is_cap) {
        QuadFit shifted = top_fit;
        shifted.c0 += top_cap - top_fit.vertex_y();
        for (long i = ihi - 1; i <= ihi; ++i)
          v[i] = -quad_solve_branch(shifted, y_at(i), -v[i]);
      }
      if (bot_is_cap) {
        QuadFit shifted = bot_fit;
        shifted.c0 += bot_cap - bot_fit.vertex_y();
        for (long i = ilo; i <= ilo + 1; ++i)
          v[i] = -quad_solve_branch(shifted, y_at(i), -v[i]);
      }
    }
  };
  const auto stop = [&]() { return extinct; };
  const auto emit = [&](double t) {
    GraphCurve g;
    g.side = g0.side;
    g.y_lo = y_at(ilo);
    g.y_hi = y_at(ihi);
    g.v.assign(v.begin() + long(ilo), v.begin() + long(ihi) + 1);
    trace.times.push_back(t);
    trace.snapshots.emplace_back(std::move(g));
  };
  const auto stable_dt = [&]() { return dy * dy; };

  trace.status =
      run_steps(outputs, window.t_start, ctl, step, stop, emit, stable_dt);
  trace.validate();
  return trace;
}

// --- front-tracking oracle ---------------------------------------------------

FlowTrace evolve_polyline_oracle(const Polyline& p0, const TimeWindow& window,
                                 const StepControl& ctl) {
  if (!p0.closed || p0.size() < 32)
    raise(Err::invalid_argument,
          "oracle needs a closed polyline with >= 32 vertices");
  if (!is_convex(p0)) raise(Err::not_convex, "oracle needs convex input");
  // Front tracking is always explicit.
  StepControl ctl_ex = ctl;
  ctl_ex.scheme = Scheme::explicit_euler;
  if (!(ctl_ex.cfl > 0.0 && ctl_ex.cfl <= 0.5)) ctl_ex.cfl = 0.4;
  const std::vector<double> outputs = output_grid(window, ctl_ex);
  const std::size_t m = p0.size();

  Polyline cur = resample(p0, m);
  const double area0 = shoelace_area(cur);
  const double area_floor = 1e-6 * area0;
  bool extinct = false;

  const auto min_edge = [&]() {
    double e = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
      e = std::min(e, norm(cur.points[(i + 1) % m] - cur.points[i]));
    return e;
  };

  FlowTrace trace;
  const auto step = [&](double dt) {
    std::vector<Vec2> next(m);
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2 pm = cur.points[(i + m - 1) % m];
      const Vec2 pc = cur.points[i];
      const Vec2 pp = cur.points[(i + 1) % m];
      const double k = menger_curvature(pm, pc, pp);
      const Vec2 chord = pp - pm;
      const Vec2 inward = normalized(perp(chord));  // left of the chord
      next[i] = pc + dt * k * inward;               // pure normal motion
    }
    cur.points.swap(next);
    cur = resample(cur, m);  // tangential redistribution
    if (!is_convex(cur, 1e-7))
      raise(Err::self_intersection, "front tracking lost convexity");
    if (shoelace_area(cur) < area_floor) extinct = true;
  };
  const auto stop = [&]() {
    return extinct || shoelace_area(cur) < area_floor;
  };
  const auto emit = [&](double t) {
    trace.times.push_back(t);
    trace.snapshots.emplace_back(cur);
  };
  const auto stable_dt = [&]() {
    const double e = min_edge();
    return e * e;
  };

  trace.status =
      run_steps(outputs, window.t_start, ctl_ex, step, stop, emit, stable_dt);
  trace.validate();
  return trace;
}

// --- exact traces -------------------------------------------------------------

FlowTrace exact_polyline_trace(const ExactFamily& f,
                               const std::vector<double>& times, std::size_t n,
                               std::optional<ClipBox> clip,
                               bool tip_frame_clip) {
  FlowTrace trace;
  trace.ancient = true;
  for (double t : times) {
    std::optional<ClipBox> box = clip;
    if (box && tip_frame_clip) {
      // Box given relative to the tip (0, t); follow it so nodes of
      // consecutive snapshots correspond.
      const Vec2 tip = f.to_world({0.0, f.canonical_time(t)});
      box->x_min += tip.x;
      box->x_max += tip.x;
      box->y_min += tip.y;
      box->y_max += tip.y;
    }
    trace.times.push_back(t);
    trace.snapshots.emplace_back(sample_exact(f, t, n, box));
  }
  trace.validate();
  return trace;
}

FlowTrace exact_support_trace(const ExactFamily& f,
                              const std::vector<double>& times,
                              std::size_t n) {
  FlowTrace trace;
  trace.ancient = true;
  for (double t : times) {
    trace.times.push_back(t);
    trace.snapshots.emplace_back(exact_support(f, t, n));
  }
  trace.validate();
  return trace;
}

FlowTrace exact_kappa_trace(const ExactFamily& f,
                            const std::vector<double>& times, std::size_t n,
                            double gauss_fraction) {
  FlowTrace trace;
  trace.ancient = true;
  for (double t : times) {
    trace.times.push_back(t);
    trace.snapshots.emplace_back(exact_turning_curve(f, t, n, gauss_fraction));
  }
  trace.validate();
  return trace;
}

}  // namespace flowlab
