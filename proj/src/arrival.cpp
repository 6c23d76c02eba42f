#include "flowlab/arrival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "flowlab/diagnostics.hpp"

namespace flowlab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void GridSpec::validate() const {
  if (!(x1 > x0 && y1 > y0 && h > 0.0))
    raise(Err::invalid_argument, "grid spec must have positive extents");
  if ((x1 - x0) / h > 1e5 || (y1 - y0) / h > 1e5)
    raise(Err::invalid_argument, "grid too large");
}

bool ArrivalTimeField::interior(std::size_t i, std::size_t j) const {
  if (i == 0 || j == 0 || i + 1 >= nx || j + 1 >= ny) return false;
  for (std::size_t dj = 0; dj < 3; ++dj)
    for (std::size_t di = 0; di < 3; ++di)
      if (!in(i + di - 1, j + dj - 1)) return false;
  return true;
}

std::size_t ArrivalTimeField::count_interior() const {
  std::size_t c = 0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      if (interior(i, j)) ++c;
  return c;
}

double ArrivalTimeField::min_u() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k)
    if (mask[k]) m = std::min(m, u[k]);
  return m;
}

bool ArrivalTimeField::mask_lattice_convex() const {
  for (std::size_t j = 0; j < ny; ++j) {
    long first = -1, last = -1;
    for (std::size_t i = 0; i < nx; ++i)
      if (in(i, j)) {
        if (first < 0) first = long(i);
        last = long(i);
      }
    for (long i = first; i >= 0 && i <= last; ++i)
      if (!in(std::size_t(i), j)) return false;
  }
  for (std::size_t i = 0; i < nx; ++i) {
    long first = -1, last = -1;
    for (std::size_t j = 0; j < ny; ++j)
      if (in(i, j)) {
        if (first < 0) first = long(j);
        last = long(j);
      }
    for (long j = first; j >= 0 && j <= last; ++j)
      if (!in(i, std::size_t(j))) return false;
  }
  return true;
}

ArrivalTimeField exact_arrival_field(const ExactFamily& f, const GridSpec& g) {
  g.validate();
  ArrivalTimeField field;
  field.x0 = g.x0;
  field.y0 = g.y0;
  field.hx = field.hy = g.h;
  field.nx = std::size_t((g.x1 - g.x0) / g.h + 1.5);
  field.ny = std::size_t((g.y1 - g.y0) / g.h + 1.5);
  field.u.assign(field.nx * field.ny, kNaN);
  field.mask.assign(field.nx * field.ny, 0);
  field.source = FieldSource::closed_form;
  for (std::size_t j = 0; j < field.ny; ++j) {
    for (std::size_t i = 0; i < field.nx; ++i) {
      try {
        const double u = exact_arrival_time(f, field.node(i, j));
        field.u[field.idx(i, j)] = u;
        field.mask[field.idx(i, j)] = 1;
      } catch (const FlowError&) {
        // outside the swept region
      }
    }
  }
  return field;
}

ArrivalTimeField reconstruct_arrival(const FlowTrace& trace,
                                     const GridSpec& g) {
  trace.validate();
  g.validate();
  if (trace.size() < 2)
    raise(Err::not_nested, "need at least two snapshots to bracket nodes");

  std::vector<Polyline> curves;
  curves.reserve(trace.size());
  for (const Snapshot& s : trace.snapshots)
    curves.push_back(snapshot_polyline(s));

  // Nesting check: late curves lie inside early ones (convexity makes the
  // vertex test sufficient).
  for (std::size_t j = 0; j + 1 < curves.size(); ++j) {
    const Polyline& outer = curves[j];
    const Polyline& inner = curves[j + 1];
    std::size_t stride = std::max<std::size_t>(1, inner.size() / 16);
    for (std::size_t i = 0; i < inner.size(); i += stride)
      if (!inside_convex(inner.points[i], outer))
        raise(Err::not_nested, "snapshots are not nested");
  }

  ArrivalTimeField field;
  field.x0 = g.x0;
  field.y0 = g.y0;
  field.hx = field.hy = g.h;
  field.nx = std::size_t((g.x1 - g.x0) / g.h + 1.5);
  field.ny = std::size_t((g.y1 - g.y0) / g.h + 1.5);
  field.u.assign(field.nx * field.ny, kNaN);
  field.mask.assign(field.nx * field.ny, 0);
  field.source = FieldSource::reconstructed;

  for (std::size_t j = 0; j < field.ny; ++j) {
    for (std::size_t i = 0; i < field.nx; ++i) {
      const Vec2 q = field.node(i, j);
      if (!inside_convex(q, curves.front())) continue;  // never swept here
      // Largest index whose curve still contains q (monotone by nesting).
      std::size_t lo = 0, hi = curves.size() - 1;
      if (inside_convex(q, curves[hi])) continue;  // flow never reached q
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (inside_convex(q, curves[mid]) ? lo : hi) = mid;
      }
      const double d_in = point_polyline_distance(q, curves[lo]);
      const double d_out = point_polyline_distance(q, curves[hi]);
      const double w = (d_in + d_out > 0.0) ? d_in / (d_in + d_out) : 0.5;
      field.u[field.idx(i, j)] =
          trace.times[lo] + w * (trace.times[hi] - trace.times[lo]);
      field.mask[field.idx(i, j)] = 1;
    }
  }
  return field;
}

namespace {

struct Hessian {
  double uxx, uxy, uyy;

  double larger_eigenvalue() const {
    const double tr = 0.5 * (uxx + uyy);
    const double d = std::hypot(0.5 * (uxx - uyy), uxy);
    return tr + d;
  }
  double smaller_eigenvalue() const {
    const double tr = 0.5 * (uxx + uyy);
    const double d = std::hypot(0.5 * (uxx - uyy), uxy);
    return tr - d;
  }
};

template <class Value>
Hessian central_hessian(const ArrivalTimeField& f, std::size_t i,
                        std::size_t j, Value val) {
  const double hx = f.hx, hy = f.hy;
  const double c = val(i, j);
  Hessian h;
  h.uxx = (val(i + 1, j) - 2.0 * c + val(i - 1, j)) / (hx * hx);
  h.uyy = (val(i, j + 1) - 2.0 * c + val(i, j - 1)) / (hy * hy);
  h.uxy = (val(i + 1, j + 1) - val(i - 1, j + 1) - val(i + 1, j - 1) +
           val(i - 1, j - 1)) /
          (4.0 * hx * hy);
  return h;
}

}  // namespace

HessianAudit concavity_audit(const ArrivalTimeField& f) {
  HessianAudit audit;
  audit.extremal_eigenvalue = -std::numeric_limits<double>::infinity();
  const auto val = [&](std::size_t i, std::size_t j) {
    return f.u[f.idx(i, j)];
  };
  for (std::size_t j = 1; j + 1 < f.ny; ++j) {
    for (std::size_t i = 1; i + 1 < f.nx; ++i) {
      if (!f.interior(i, j)) continue;
      ++audit.interior_nodes;
      const double lam = central_hessian(f, i, j, val).larger_eigenvalue();
      if (lam > audit.extremal_eigenvalue) {
        audit.extremal_eigenvalue = lam;
        audit.argmax_node = f.node(i, j);
      }
    }
  }
  if (audit.interior_nodes == 0)
    raise(Err::too_few_interior_nodes, "no full 3x3 interior nodes");
  return audit;
}

HessianAudit w_transform_audit(const ArrivalTimeField& f, double t) {
  const double umin = f.min_u();
  if (!(t < umin))
    raise(Err::invalid_shift, "need t < min u so that u - t > 0");
  HessianAudit audit;
  audit.extremal_eigenvalue = std::numeric_limits<double>::infinity();
  const auto val = [&](std::size_t i, std::size_t j) {
    return -std::log(f.u[f.idx(i, j)] - t);
  };
  for (std::size_t j = 1; j + 1 < f.ny; ++j) {
    for (std::size_t i = 1; i + 1 < f.nx; ++i) {
      if (!f.interior(i, j)) continue;
      ++audit.interior_nodes;
      const double lam = central_hessian(f, i, j, val).smaller_eigenvalue();
      if (lam < audit.extremal_eigenvalue) {
        audit.extremal_eigenvalue = lam;
        audit.argmax_node = f.node(i, j);
      }
    }
  }
  if (audit.interior_nodes == 0)
    raise(Err::too_few_interior_nodes, "no full 3x3 interior nodes");
  return audit;
}

ResidualAudit level_set_residual(const ArrivalTimeField& f,
                                 double gradient_floor) {
  ResidualAudit audit;
  const auto val = [&](std::size_t i, std::size_t j) {
    return f.u[f.idx(i, j)];
  };
  for (std::size_t j = 1; j + 1 < f.ny; ++j) {
    for (std::size_t i = 1; i + 1 < f.nx; ++i) {
      if (!f.interior(i, j)) continue;
      const double ux = (val(i + 1, j) - val(i - 1, j)) / (2.0 * f.hx);
      const double uy = (val(i, j + 1) - val(i, j - 1)) / (2.0 * f.hy);
      const double g2 = ux * ux + uy * uy;
      if (std::sqrt(g2) < gradient_floor) {
        ++audit.degenerate_gradient;
        continue;
      }
      ++audit.interior_nodes;
      const Hessian h = central_hessian(f, i, j, val);
      const double curv_term =
          -(h.uxx * uy * uy - 2.0 * h.uxy * ux * uy + h.uyy * ux * ux) / g2;
      const double res = std::abs(curv_term - 1.0);
      if (res > audit.sup_residual) {
        audit.sup_residual = res;
        audit.argmax_node = f.node(i, j);
      }
    }
  }
  if (audit.interior_nodes == 0)
    raise(Err::too_few_interior_nodes, "no usable interior nodes");
  return audit;
}

double exact_level_set_residual(const ExactFamily& f, Vec2 p) {
  const Vec2 g = exact_arrival_gradient(f, p);
  const auto [uxx, uxy, uyy] = exact_arrival_hessian(f, p);
  const double g2 = norm2(g);
  if (g2 == 0.0) raise(Err::invalid_argument, "degenerate gradient");
  const double curv_term =
      -(uxx * g.y * g.y - 2.0 * uxy * g.x * g.y + uyy * g.x * g.x) / g2;
  return std::abs(curv_term - 1.0);
}

std::vector<RectangleSample> rectangle_claim_audit(const FlowTrace& trace,
                                                   const Tolerances& tol) {
  trace.validate();
  const WidthReport width = width_and_strip(trace, tol);
  if (width.verdict != StripVerdict::strip)
    raise(Err::not_strip_pose, "trace is not in a strip");
  if (std::abs(width.axis.y) > 0.05)
    raise(Err::not_strip_pose, "strip is not aligned with the y-axis");

  std::vector<RectangleSample> out;
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const double t = trace.times[j];
    const Polyline poly = snapshot_polyline(trace.snapshots[j]);
    const auto [plus, minus] = split_graphs(poly);
    // v^-(0) - v^+(0) = horizontal width at y = 0.
    const auto value_at = [](const GraphCurve& g, double y) {
      const double s = (y - g.y_lo) / g.dy();
      const std::size_t i =
          std::min(std::size_t(std::max(s, 0.0)), g.size() - 2);
      const double w = std::clamp(s - double(i), 0.0, 1.0);
      return (1.0 - w) * g.v[i] + w * g.v[i + 1];
    };
    if (!(plus.y_lo < 0.0 && plus.y_hi > 0.0))
      raise(Err::not_strip_pose, "snapshot does not straddle y = 0");
    const double width0 = value_at(minus, 0.0) - value_at(plus, 0.0);
    const double lhs =
        std::min(std::abs(plus.y_lo), std::abs(plus.y_hi)) * width0;
    out.push_back({t, lhs, -std::numbers::pi * t / 4.0});
  }
  return out;
}

}  // namespace flowlab
