#include "flowlab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "flowlab/arrival.hpp"
#include "flowlab/diagnostics.hpp"
#include "flowlab/trace_io.hpp"

namespace flowlab {

using nlohmann::json;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

const char* to_string(IntegratorKind k) {
  switch (k) {
    case IntegratorKind::support: return "support";
    case IntegratorKind::kappa: return "kappa";
    case IntegratorKind::graph: return "graph";
    case IntegratorKind::oracle: return "oracle";
    case IntegratorKind::exact_sampler: return "exact";
  }
  return "unknown";
}

const char* to_string(AuditVerdict v) {
  switch (v) {
    case AuditVerdict::pass: return "PASS";
    case AuditVerdict::fail: return "FAIL";
    case AuditVerdict::info: return "INFO";
  }
  return "unknown";
}

// --- strict JSON parsing ------------------------------------------------------

namespace {

void expect_keys(const json& j, std::initializer_list<const char*> keys,
                 const std::string& where) {
  if (!j.is_object())
    raise(Err::config_error, where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known)
      raise(Err::config_error, "unknown key '" + key + "' in " + where);
  }
}

double get_num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key))
    raise(Err::config_error, where + " is missing '" + key + "'");
  if (!j[key].is_number())
    raise(Err::config_error, where + "." + key + " must be a number");
  return j[key].get<double>();
}

ExactFamily parse_family(const json& j) {
  expect_keys(j, {"kind", "rotation", "translation", "scale"}, "family");
  if (!j.contains("kind") || !j["kind"].is_string())
    raise(Err::config_error, "family.kind must be a string");
  const auto kind = family_from_string(j["kind"].get<std::string>());
  if (!kind)
    raise(Err::config_error,
          "unknown family kind '" + j["kind"].get<std::string>() + "'");
  ExactFamily f;
  f.kind = *kind;
  if (j.contains("rotation")) f.rotation = get_num(j, "rotation", "family");
  if (j.contains("scale")) f.scale = get_num(j, "scale", "family");
  if (j.contains("translation")) {
    const json& t = j["translation"];
    if (!t.is_array() || t.size() != 2)
      raise(Err::config_error, "family.translation must be [x, y]");
    f.translation = {t[0].get<double>(), t[1].get<double>()};
  }
  if (!(f.scale > 0.0)) raise(Err::config_error, "family.scale must be > 0");
  return f;
}

InitialSpec parse_initial(const json& j) {
  expect_keys(j, {"family", "polyline_csv", "fourier"}, "initial");
  InitialSpec init;
  int sources = 0;
  if (j.contains("family")) {
    init.family = parse_family(j["family"]);
    ++sources;
  }
  if (j.contains("polyline_csv")) {
    if (!j["polyline_csv"].is_string())
      raise(Err::config_error, "initial.polyline_csv must be a string");
    init.polyline_csv = j["polyline_csv"].get<std::string>();
    ++sources;
  }
  if (j.contains("fourier")) {
    const json& f = j["fourier"];
    expect_keys(f, {"r0", "a", "b", "seed", "modes", "amplitude"},
                "initial.fourier");
    InitialSpec::Fourier four;
    four.r0 = get_num(f, "r0", "initial.fourier");
    if (f.contains("a")) four.a = f["a"].get<std::vector<double>>();
    if (f.contains("b")) four.b = f["b"].get<std::vector<double>>();
    if (f.contains("seed")) four.seed = f["seed"].get<unsigned>();
    if (f.contains("modes")) four.modes = f["modes"].get<std::size_t>();
    if (f.contains("amplitude"))
      four.amplitude = f["amplitude"].get<double>();
    init.fourier = four;
    ++sources;
  }
  if (sources != 1)
    raise(Err::config_error,
          "initial needs exactly one of family / polyline_csv / fourier");
  return init;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(Err::config_error, std::string("scenario is not valid JSON: ") +
                                 e.what());
  }
  expect_keys(j,
              {"version", "name", "initial", "integrator", "window", "step",
               "nodes", "clip", "tip_frame_clip", "graph_bc", "graph_side",
               "audits", "out_dir"},
              "scenario");
  Scenario sc;
  if (!j.contains("version") || !j["version"].is_number_integer())
    raise(Err::config_error, "scenario needs an integer 'version'");
  sc.version = j["version"].get<int>();
  if (sc.version != 1)
    raise(Err::config_error, "unsupported scenario version");
  if (!j.contains("name") || !j["name"].is_string())
    raise(Err::config_error, "scenario needs a string 'name'");
  sc.name = j["name"].get<std::string>();
  if (!j.contains("initial"))
    raise(Err::config_error, "scenario is missing 'initial'");
  sc.initial = parse_initial(j["initial"]);

  if (!j.contains("integrator") || !j["integrator"].is_string())
    raise(Err::config_error, "scenario needs a string 'integrator'");
  const std::string integ = j["integrator"].get<std::string>();
  if (integ == "support") sc.integrator = IntegratorKind::support;
  else if (integ == "kappa") sc.integrator = IntegratorKind::kappa;
  else if (integ == "graph") sc.integrator = IntegratorKind::graph;
  else if (integ == "oracle") sc.integrator = IntegratorKind::oracle;
  else if (integ == "exact") sc.integrator = IntegratorKind::exact_sampler;
  else raise(Err::config_error, "unknown integrator '" + integ + "'");

  if (!j.contains("window"))
    raise(Err::config_error, "scenario is missing 'window'");
  expect_keys(j["window"], {"t_start", "t_end"}, "window");
  sc.window.t_start = get_num(j["window"], "t_start", "window");
  sc.window.t_end = get_num(j["window"], "t_end", "window");
  if (!(sc.window.t_start < sc.window.t_end))
    raise(Err::config_error, "window must have t_start < t_end");

  if (j.contains("nodes")) {
    if (!j["nodes"].is_number_unsigned())
      raise(Err::config_error, "nodes must be a positive integer");
    sc.nodes = j["nodes"].get<std::size_t>();
  }

  if (j.contains("step")) {
    const json& s = j["step"];
    expect_keys(s, {"scheme", "cfl", "dt_max", "outputs"}, "step");
    if (s.contains("scheme")) {
      const std::string scheme = s["scheme"].get<std::string>();
      if (scheme == "explicit") sc.step.scheme = Scheme::explicit_euler;
      else if (scheme == "semi_implicit")
        sc.step.scheme = Scheme::semi_implicit;
      else raise(Err::config_error, "unknown scheme '" + scheme + "'");
    }
    if (s.contains("cfl")) sc.step.cfl = get_num(s, "cfl", "step");
    if (s.contains("dt_max")) sc.step.dt_max = get_num(s, "dt_max", "step");
    if (s.contains("outputs")) {
      const json& o = s["outputs"];
      if (o.is_number_unsigned()) {
        sc.step.t_grid_output =
            linspace(sc.window.t_start, sc.window.t_end, o.get<std::size_t>());
      } else if (o.is_array()) {
        sc.step.t_grid_output = o.get<std::vector<double>>();
      } else if (o.is_object()) {
        expect_keys(o, {"count", "spacing"}, "step.outputs");
        const std::size_t count = o.at("count").get<std::size_t>();
        const std::string spacing =
            o.contains("spacing") ? o["spacing"].get<std::string>() : "linear";
        if (spacing == "log")
          sc.step.t_grid_output =
              logspace_times(sc.window.t_start, sc.window.t_end, count);
        else if (spacing == "linear")
          sc.step.t_grid_output =
              linspace(sc.window.t_start, sc.window.t_end, count);
        else raise(Err::config_error, "unknown output spacing");
      } else {
        raise(Err::config_error, "step.outputs must be count/list/object");
      }
    }
  }

  if (j.contains("clip")) {
    const json& c = j["clip"];
    if (!c.is_array() || c.size() != 4)
      raise(Err::config_error, "clip must be [x_min, x_max, y_min, y_max]");
    sc.clip = ClipBox{c[0].get<double>(), c[1].get<double>(),
                      c[2].get<double>(), c[3].get<double>()};
  }
  if (j.contains("tip_frame_clip")) {
    if (!j["tip_frame_clip"].is_boolean())
      raise(Err::config_error, "tip_frame_clip must be a boolean");
    sc.tip_frame_clip = j["tip_frame_clip"].get<bool>();
  }
  if (j.contains("graph_bc")) {
    const std::string bc = j["graph_bc"].get<std::string>();
    if (bc == "fixed") sc.graph_bc = GraphBoundary::fixed_ends;
    else if (bc == "free") sc.graph_bc = GraphBoundary::free_vertical_tangent;
    else raise(Err::config_error, "graph_bc must be fixed/free");
  }
  if (j.contains("graph_side")) {
    const std::string side = j["graph_side"].get<std::string>();
    if (side == "plus") sc.graph_side = GraphSide::plus;
    else if (side == "minus") sc.graph_side = GraphSide::minus;
    else raise(Err::config_error, "graph_side must be plus/minus");
  }

  if (j.contains("audits")) {
    if (!j["audits"].is_array())
      raise(Err::config_error, "audits must be an array");
    for (const json& a : j["audits"]) {
      expect_keys(a, {"name", "tol", "expect"}, "audit");
      AuditRequest req;
      if (!a.contains("name") || !a["name"].is_string())
        raise(Err::config_error, "each audit needs a string name");
      req.name = a["name"].get<std::string>();
      if (a.contains("tol")) req.tol = a["tol"].get<double>();
      if (a.contains("expect")) req.expect = a["expect"].get<std::string>();
      sc.audits.push_back(req);
    }
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string())
      raise(Err::config_error, "out_dir must be a string");
    sc.out_dir = j["out_dir"].get<std::string>();
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Err::io_error, "cannot open scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// --- initial data -------------------------------------------------------------

namespace {

SupportCurve fourier_support(const InitialSpec::Fourier& f, std::size_t n) {
  std::vector<double> a = f.a, b = f.b;
  if (f.seed) {
    std::mt19937 rng(*f.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (std::size_t k = 1; k <= f.modes; ++k) {
      const double damp = f.amplitude / double(k * k);
      a.push_back(uni(rng) * damp);
      b.push_back(uni(rng) * damp);
    }
  }
  SupportCurve s;
  s.center = {0.0, 0.0};
  s.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = kTwoPi * double(i) / double(n);
    double h = f.r0;
    for (std::size_t k = 0; k < a.size(); ++k)
      h += a[k] * std::cos(double(k + 1) * th);
    for (std::size_t k = 0; k < b.size(); ++k)
      h += b[k] * std::sin(double(k + 1) * th);
    s.h[i] = h;
  }
  if (s.min_rho() <= 0.0)
    raise(Err::config_error, "fourier initial data is not convex");
  return s;
}

Polyline initial_polyline(const Scenario& sc) {
  if (sc.initial.family) {
    return sample_exact(*sc.initial.family, sc.window.t_start, sc.nodes,
                        sc.clip);
  }
  if (sc.initial.polyline_csv) {
    Polyline p = read_polyline_csv(*sc.initial.polyline_csv);
    if (p.size() != sc.nodes && p.closed) p = resample(p, sc.nodes);
    return p;
  }
  std::size_t n = 16;
  while (n < sc.nodes) n <<= 1;
  return polyline_from_support(fourier_support(*sc.initial.fourier, n));
}

SupportCurve initial_support(const Scenario& sc) {
  if (sc.initial.family)
    return exact_support(*sc.initial.family, sc.window.t_start, sc.nodes);
  if (sc.initial.fourier) return fourier_support(*sc.initial.fourier, sc.nodes);
  std::size_t n = 16;
  while (n < sc.nodes) n <<= 1;
  return support_from_polyline(read_polyline_csv(*sc.initial.polyline_csv), n);
}

TurningAngleCurve kappa_from_support(const SupportCurve& s) {
  TurningAngleCurve c;
  const std::size_t n = s.size();
  c.closed = true;
  c.theta.resize(n);
  c.kappa.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.theta[i] = s.theta(i) + kPi / 2.0;  // tangent angle at the contact point
    const double r = s.rho(i);
    if (!(r > 0.0)) raise(Err::not_convex, "support data not convex");
    c.kappa[i] = 1.0 / r;
  }
  c.base_point = polyline_from_support(s).points[0];
  return c;
}

TurningAngleCurve initial_kappa(const Scenario& sc) {
  if (sc.initial.family)
    return exact_turning_curve(*sc.initial.family, sc.window.t_start,
                               sc.nodes);
  return kappa_from_support(initial_support(sc));
}

}  // namespace

// --- audits ---------------------------------------------------------------------

namespace {

struct AuditContext {
  const Scenario& sc;
  FlowTrace& trace;
  const Tolerances& tol;
};

using AuditFn = std::function<AuditResult(AuditContext&, const AuditRequest&)>;

struct AuditEntry {
  AuditInfo info;
  AuditFn fn;
};

AuditResult make_result(const std::string& name, AuditVerdict v,
                        double measured, double tol,
                        const std::string& detail = {}) {
  return {name, v, measured, tol, detail};
}

AuditVerdict pass_iff(bool ok) {
  return ok ? AuditVerdict::pass : AuditVerdict::fail;
}

double mean_kappa(const FlowTrace& trace) {
  const auto* tc = std::get_if<TurningAngleCurve>(&trace.snapshots.front());
  if (!tc) return 1.0;
  double s = 0.0;
  for (double k : tc->kappa) s += k;
  return s / double(tc->kappa.size());
}

AuditResult audit_radius_law(AuditContext& ctx, const AuditRequest& req) {
  const double tol = req.tol.value_or(1e-4);
  if (!ctx.sc.initial.family ||
      ctx.sc.initial.family->kind != FamilyKind::shrinking_circle)
    return make_result(req.name, AuditVerdict::info, kNaN, tol,
                       "needs a shrinking-circle scenario");
  const Vec2 center = ctx.sc.initial.family->translation;
  double worst = 0.0;
  for (std::size_t j = 0; j < ctx.trace.size(); ++j) {
    const Polyline p = snapshot_polyline(ctx.trace.snapshots[j]);
    double r = 0.0;
    for (const Vec2& q : p.points) r += norm(q - center);
    r /= double(p.size());
    worst = std::max(worst,
                     std::abs(r - std::sqrt(-2.0 * ctx.trace.times[j])));
  }
  return make_result(req.name, pass_iff(worst <= tol), worst, tol);
}

AuditResult audit_area_law(AuditContext& ctx, const AuditRequest& req) {
  const double tol = req.tol.value_or(ctx.tol.area_law_rel);
  std::vector<double> ts, areas;
  for (const DiagnosticsRecord& r : ctx.trace.diagnostics)
    if (std::isfinite(r.area) && std::isfinite(r.iso_ratio)) {
      ts.push_back(r.t);
      areas.push_back(r.area);
    }
  if (ts.size() < 2)
    return make_result(req.name, AuditVerdict::info, kNaN, tol,
                       "needs a compact trace");
  double t_ext = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j)
    t_ext += ts[j] + areas[j] / kTwoPi;
  t_ext /= double(ts.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j)
    worst = std::max(worst, std::abs(areas[j] + kTwoPi * (ts[j] - t_ext)) /
                                std::max(std::abs(ts[j]), 1e-9));
  return make_result(req.name, pass_iff(worst <= tol), worst, tol,
                     "t_ext=" + format_double(t_ext));
}

AuditResult audit_theta_monotonicity(AuditContext& ctx,
                                     const AuditRequest& req) {
  const double tol = req.tol.value_or(ctx.tol.theta_monotonicity_slack);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t pairs = 0;
  for (std::size_t j = 0; j + 1 < ctx.trace.size(); ++j) {
    const double a = ctx.trace.diagnostics[j].theta_gauss;
    const double b = ctx.trace.diagnostics[j + 1].theta_gauss;
    if (std::isfinite(a) && std::isfinite(b)) {
      worst = std::max(worst, b - a);
      ++pairs;
    }
  }
  if (pairs == 0)
    return make_result(req.name, AuditVerdict::info, kNaN, tol,
                       "no Gaussian-area pairs");
  return make_result(req.name, pass_iff(worst <= tol), worst, tol);
}

AuditResult audit_clipped_area_speed(AuditContext& ctx,
                                     const AuditRequest& req) {
  const double margin = req.tol.value_or(ctx.tol.clipped_speed_margin);
  double max_speed = -std::numeric_limits<double>::infinity();
  double min_speed = std::numeric_limits<double>::infinity();
  std::size_t pairs = 0;
  for (std::size_t j = 0; j + 1 < ctx.trace.size(); ++j) {
    const double a0 = ctx.trace.diagnostics[j].area;
    const double a1 = ctx.trace.diagnostics[j + 1].area;
    if (!std::isfinite(a0) || !std::isfinite(a1)) continue;
    if (std::isfinite(ctx.trace.diagnostics[j].iso_ratio)) continue;  // closed
    const double speed =
        -(a1 - a0) / (ctx.trace.times[j + 1] - ctx.trace.times[j]);
    max_speed = std::max(max_speed, speed);
    min_speed = std::min(min_speed, speed);
    ++pairs;
  }
  if (pairs == 0)
    return make_result(req.name, AuditVerdict::info, kNaN, margin,
                       "needs a clipped-area trace");
  const bool ok = min_speed > 0.0 && max_speed <= kPi + margin;
  return make_result(req.name, pass_iff(ok), max_speed - kPi, margin,
                     "min_speed=" + format_double(min_speed));
}

AuditResult audit_entropy_bound(AuditContext& ctx, const AuditRequest& req) {
  const double ceiling = req.tol.value_or(ctx.tol.entropy_ceiling);
  double worst = 0.0;
  for (const Snapshot& s : ctx.trace.snapshots)
    worst = std::max(worst, entropy_bound_check(snapshot_polyline(s)));
  return make_result(req.name, pass_iff(worst <= ceiling), worst, ceiling);
}

AuditResult audit_harnack(AuditContext& ctx, const AuditRequest& req) {
  const double rel = req.tol.value_or(ctx.tol.harnack_rel);
  if (!std::holds_alternative<TurningAngleCurve>(ctx.trace.snapshots.front()))
    return make_result(req.name, AuditVerdict::info, kNaN, rel,
                       "needs turning-angle snapshots");
  const double violation = harnack_check(ctx.trace) / mean_kappa(ctx.trace);
  if (!ctx.trace.ancient)
    return make_result(req.name, AuditVerdict::info, violation, rel,
                       "trace is not from ancient data");
  return make_result(req.name, pass_iff(violation <= rel), violation, rel);
}

AuditResult audit_displacement(AuditContext& ctx, const AuditRequest& req) {
  const double slack = req.tol.value_or(ctx.tol.displacement_slack);
  const auto series = displacement_series(ctx.trace);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < series.size(); ++j)
    worst = std::max(worst, series[j + 1].ell_plus_t - series[j].ell_plus_t);
  if (!ctx.trace.ancient)
    return make_result(req.name, AuditVerdict::info, worst, slack,
                       "trace is not from ancient data");
  return make_result(req.name, pass_iff(worst <= slack), worst, slack);
}

AuditResult audit_width_strip(AuditContext& ctx, const AuditRequest& req) {
  const WidthReport rep = width_and_strip(ctx.trace, ctx.tol);
  std::ostringstream detail;
  detail << "{\"verdict\":\"" << to_string(rep.verdict) << "\",\"axis\":["
         << format_double(rep.axis.x) << "," << format_double(rep.axis.y)
         << "],\"exponent\":" << format_double(rep.growth_exponent) << "}";
  if (!req.expect)
    return make_result(req.name, AuditVerdict::info, rep.growth_exponent, 0.0,
                       detail.str());
  const bool ok = *req.expect == to_string(rep.verdict);
  return make_result(req.name, pass_iff(ok), rep.growth_exponent, 0.0,
                     detail.str());
}

AuditResult audit_grim_fit(AuditContext& ctx, const AuditRequest& req) {
  const double tol = req.tol.value_or(0.05);
  const double scale =
      ctx.sc.initial.family ? ctx.sc.initial.family->scale : 1.0;
  try {
    const Polyline tip = tip_frame(ctx.trace.snapshots.front(), TipEnd::theta0);
    const GrimFit fit = fit_grim_reaper(tip, 2.0 * scale, ctx.tol);
    const double measured = std::abs(fit.r - scale);
    return make_result(req.name, pass_iff(measured <= tol), measured, tol,
                       "r=" + format_double(fit.r));
  } catch (const FlowError& e) {
    return make_result(req.name, AuditVerdict::fail, kNaN, tol, e.what());
  }
}

AuditResult audit_blowdown(AuditContext& ctx, const AuditRequest& req) {
  const double t0 = ctx.trace.times.front();
  const double t1 = ctx.trace.times.back();
  if (!(t1 < 0.0))
    return make_result(req.name, AuditVerdict::info, kNaN, 0.0,
                       "trace must end before t = 0");
  const double lam_min = std::sqrt(2.0 / (-t0));
  const double lam_max = std::sqrt(1.0 / (-t1));
  if (lam_max / lam_min < 10.0)
    return make_result(req.name, AuditVerdict::info, kNaN, 0.0,
                       "trace spans too little time for a blow-down");
  std::vector<double> lambdas;
  for (int k = 0; k < 4; ++k)
    lambdas.push_back(lam_min *
                      std::pow(lam_max / lam_min, double(k) / 3.0));
  const auto rescaled = blow_down(ctx.trace, lambdas);
  const ClassificationVerdict verdict =
      classify_blow_down(rescaled, lambdas, ctx.tol);
  std::ostringstream detail;
  detail << "{\"kind\":\"" << to_string(verdict.kind)
         << "\",\"gaussian_area_limit\":"
         << format_double(verdict.gaussian_area_limit) << ",\"axis\":["
         << format_double(verdict.axis.x) << ","
         << format_double(verdict.axis.y)
         << "],\"confidence\":" << format_double(verdict.confidence) << "}";
  if (!req.expect)
    return make_result(req.name, AuditVerdict::info,
                       verdict.gaussian_area_limit, 0.0, detail.str());
  const bool ok = *req.expect == to_string(verdict.kind);
  return make_result(req.name, pass_iff(ok), verdict.gaussian_area_limit,
                     ctx.tol.theta_verdict, detail.str());
}

AuditResult audit_reflection(AuditContext& ctx, const AuditRequest& req) {
  double default_tol = 1e-8;
  if (ctx.sc.integrator != IntegratorKind::exact_sampler) {
    const Polyline last = snapshot_polyline(ctx.trace.snapshots.back());
    default_tol = 2.0 * last.length() / double(last.size());
  }
  const double tol = req.tol.value_or(default_tol);
  double worst = 0.0;
  for (const Snapshot& s : ctx.trace.snapshots)
    worst = std::max(worst,
                     reflection_defect(snapshot_polyline(s), 0.0)
                         .symmetry_defect);
  return make_result(req.name, pass_iff(worst <= tol), worst, tol);
}

AuditResult audit_rectangle(AuditContext& ctx, const AuditRequest& req) {
  const double tol = req.tol.value_or(1e-9);
  try {
    const auto samples = rectangle_claim_audit(ctx.trace, ctx.tol);
    double worst = -std::numeric_limits<double>::infinity();
    for (const RectangleSample& s : samples)
      worst = std::max(worst, s.rhs - s.lhs);
    return make_result(req.name, pass_iff(worst <= tol), worst, tol);
  } catch (const FlowError& e) {
    if (e.code() == Err::not_strip_pose)
      return make_result(req.name, AuditVerdict::info, kNaN, tol, e.what());
    throw;
  }
}

AuditResult audit_arrival_concavity(AuditContext& ctx,
                                    const AuditRequest& req) {
  const Polyline first = snapshot_polyline(ctx.trace.snapshots.front());
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Vec2& q : first.points) {
    xmin = std::min(xmin, q.x);
    xmax = std::max(xmax, q.x);
    ymin = std::min(ymin, q.y);
    ymax = std::max(ymax, q.y);
  }
  GridSpec g{xmin, xmax, ymin, ymax,
             std::max(xmax - xmin, ymax - ymin) / 160.0};
  const double tol = req.tol.value_or(ctx.tol.concavity_slope * g.h);
  const ArrivalTimeField field = reconstruct_arrival(ctx.trace, g);
  const HessianAudit audit = concavity_audit(field);
  return make_result(req.name, pass_iff(audit.extremal_eigenvalue <= tol),
                     audit.extremal_eigenvalue, tol);
}

AuditResult audit_level_set(AuditContext& ctx, const AuditRequest& req) {
  const double tol = req.tol.value_or(0.25);
  const Polyline first = snapshot_polyline(ctx.trace.snapshots.front());
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Vec2& q : first.points) {
    xmin = std::min(xmin, q.x);
    xmax = std::max(xmax, q.x);
    ymin = std::min(ymin, q.y);
    ymax = std::max(ymax, q.y);
  }
  GridSpec g{xmin, xmax, ymin, ymax,
             std::max(xmax - xmin, ymax - ymin) / 160.0};
  const ArrivalTimeField field = reconstruct_arrival(ctx.trace, g);
  const ResidualAudit audit = level_set_residual(field);
  return make_result(req.name, pass_iff(audit.sup_residual <= tol),
                     audit.sup_residual, tol);
}

AuditResult audit_translator(AuditContext& ctx, const AuditRequest& req) {
  const double tol = req.tol.value_or(1e-6);
  if (!ctx.sc.initial.family ||
      ctx.sc.initial.family->kind != FamilyKind::grim_reaper)
    return make_result(req.name, AuditVerdict::info, kNaN, tol,
                       "needs a grim reaper scenario");
  const ExactFamily& f = *ctx.sc.initial.family;
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < ctx.trace.size(); ++j) {
    const Polyline a = snapshot_polyline(ctx.trace.snapshots[j]);
    const Polyline b = snapshot_polyline(ctx.trace.snapshots[j + 1]);
    if (a.size() != b.size())
      return make_result(req.name, AuditVerdict::info, kNaN, tol,
                         "snapshots lack node correspondence");
    const double dt = ctx.trace.times[j + 1] - ctx.trace.times[j];
    const Vec2 shift = rotate(Vec2{0.0, dt / f.scale}, f.rotation);
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, norm(b.points[i] - a.points[i] - shift));
  }
  return make_result(req.name, pass_iff(worst <= tol), worst, tol);
}

AuditResult audit_convexity(AuditContext& ctx, const AuditRequest& req) {
  std::size_t bad = 0;
  for (const Snapshot& s : ctx.trace.snapshots)
    if (!is_convex(snapshot_polyline(s))) ++bad;
  return make_result(req.name, pass_iff(bad == 0), double(bad), 0.0);
}

AuditResult audit_area_monotone(AuditContext& ctx, const AuditRequest& req) {
  const double tol = req.tol.value_or(0.0);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t pairs = 0;
  for (std::size_t j = 0; j + 1 < ctx.trace.size(); ++j) {
    const double a0 = ctx.trace.diagnostics[j].area;
    const double a1 = ctx.trace.diagnostics[j + 1].area;
    if (!std::isfinite(ctx.trace.diagnostics[j].iso_ratio)) continue;
    worst = std::max(worst, a1 - a0);
    ++pairs;
  }
  if (pairs == 0)
    return make_result(req.name, AuditVerdict::info, kNaN, tol,
                       "needs a compact trace");
  return make_result(req.name, pass_iff(worst <= tol), worst, tol);
}

const std::vector<AuditEntry>& registry() {
  static const std::vector<AuditEntry> entries = {
      {{"radius_law",
        "self-similar circle radius follows sqrt(-2t)", 1e-4},
       audit_radius_law},
      {{"area_law", "enclosed area decreases linearly at rate 2 pi", 0.01},
       audit_area_law},
      {{"theta_monotonicity",
        "Gaussian area is nonincreasing along the flow", 1e-6},
       audit_theta_monotonicity},
      {{"clipped_area_speed",
        "area below the axis is lost at a rate in (0, pi]", 0.01},
       audit_clipped_area_speed},
      {{"entropy_bound",
        "scaled Gaussian mass of convex curves stays bounded", 10.0},
       audit_entropy_bound},
      {{"harnack",
        "curvature at fixed turning angle is nondecreasing in time", 1e-6},
       audit_harnack},
      {{"displacement_monotonicity",
        "max displacement plus time is nonincreasing", 1e-6},
       audit_displacement},
      {{"width_strip",
        "width stays bounded (strip) or grows like sqrt(-t) (entire)", 0.0},
       audit_width_strip},
      {{"grim_fit_r",
        "tip profile matches a unit-width translator", 0.05},
       audit_grim_fit},
      {{"blowdown_class",
        "parabolic rescalings limit to a circle or a line of multiplicity "
        "one or two",
        0.1},
       audit_blowdown},
      {{"reflection_symmetry",
        "snapshots are reflection symmetric about the y-axis", 1e-8},
       audit_reflection},
      {{"rectangle_claim",
        "height times width at the waist dominates -pi t / 4", 1e-9},
       audit_rectangle},
      {{"arrival_concavity", "reconstructed arrival time is concave", 0.0},
       audit_arrival_concavity},
      {{"level_set_residual",
        "arrival time satisfies the level-set equation", 0.25},
       audit_level_set},
      {{"translator_residual",
        "snapshots translate vertically at unit speed", 1e-6},
       audit_translator},
      {{"convexity", "every snapshot stays convex", 0.0}, audit_convexity},
      {{"area_monotone",
        "enclosed area strictly decreases along compact traces", 0.0},
       audit_area_monotone},
  };
  return entries;
}

}  // namespace

std::vector<AuditInfo> list_audits() {
  std::vector<AuditInfo> out;
  for (const AuditEntry& e : registry()) out.push_back(e.info);
  return out;
}

// --- run ------------------------------------------------------------------------

bool RunReport::failed() const {
  for (const AuditResult& a : audits)
    if (a.verdict == AuditVerdict::fail) return true;
  return false;
}

std::string RunReport::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["wall_seconds"] = wall_seconds;
  j["trace_status"] = to_string(trace_status);
  j["artifacts"] = artifacts;
  j["audits"] = json::array();
  for (const AuditResult& a : audits) {
    json e;
    e["name"] = a.name;
    e["verdict"] = to_string(a.verdict);
    e["measured"] = std::isfinite(a.measured) ? json(a.measured) : json();
    e["tol"] = a.tol;
    if (!a.detail.empty()) e["detail"] = a.detail;
    j["audits"].push_back(e);
  }
  return j.dump(2);
}

RunReport run_scenario(const Scenario& sc, const Tolerances& tol) {
  const auto start = std::chrono::steady_clock::now();

  FlowTrace trace;
  switch (sc.integrator) {
    case IntegratorKind::support:
      trace = evolve_support(initial_support(sc), sc.window, sc.step);
      break;
    case IntegratorKind::kappa:
      trace = evolve_kappa(initial_kappa(sc), sc.window, sc.step);
      break;
    case IntegratorKind::graph: {
      const Polyline p = initial_polyline(sc);
      const auto [plus, minus] = split_graphs(p, sc.nodes);
      const GraphCurve& branch =
          (sc.graph_side == GraphSide::plus) ? plus : minus;
      trace = evolve_graph(branch, sc.window, sc.step, sc.graph_bc);
      break;
    }
    case IntegratorKind::oracle:
      trace = evolve_polyline_oracle(initial_polyline(sc), sc.window, sc.step);
      break;
    case IntegratorKind::exact_sampler: {
      if (!sc.initial.family)
        raise(Err::config_error, "exact integrator needs a family");
      StepControl ctl = sc.step;
      std::vector<double> times =
          ctl.t_grid_output.empty()
              ? linspace(sc.window.t_start, sc.window.t_end, 33)
              : ctl.t_grid_output;
      trace = exact_polyline_trace(*sc.initial.family, times, sc.nodes,
                                   sc.clip, sc.tip_frame_clip);
      break;
    }
  }
  trace.name = sc.name;
  trace.ancient = sc.initial.family.has_value();
  fill_diagnostics(trace);

  RunReport report;
  report.scenario = sc.name;
  report.trace_status = trace.status;

  AuditContext ctx{sc, trace, tol};
  for (const AuditRequest& req : sc.audits) {
    const AuditEntry* entry = nullptr;
    for (const AuditEntry& e : registry())
      if (e.info.name == req.name) entry = &e;
    if (!entry) raise(Err::config_error, "unknown audit '" + req.name + "'");
    if (req.tol && !(*req.tol > 0.0) && req.name != "area_monotone" &&
        req.name != "convexity")
      raise(Err::config_error, "audit tolerances must be positive");
    report.audits.push_back(entry->fn(ctx, req));
  }

  if (sc.out_dir) {
    const std::filesystem::path dir = *sc.out_dir;
    write_trace_dir(dir / sc.name, trace);
    report.artifacts.push_back((dir / sc.name).string());
    std::ofstream out(dir / sc.name / "report.json");
    if (!out) raise(Err::io_error, "cannot write report.json");
    report.wall_seconds = 0.0;  // not part of the deterministic artifact
    out << report.to_json() << "\n";
    report.artifacts.push_back((dir / sc.name / "report.json").string());
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

int exit_code_for(const RunReport& report) { return report.failed() ? 1 : 0; }

int exit_code_for(const FlowError& error) {
  switch (error.code()) {
    case Err::config_error: return 2;
    case Err::io_error: return 3;
    default: return 2;
  }
}

}  // namespace flowlab
