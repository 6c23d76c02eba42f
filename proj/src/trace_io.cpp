#include "flowlab/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace flowlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(Err::io_error, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_polyline_csv(const std::filesystem::path& path, const Polyline& p,
                        const std::map<std::string, std::string>& meta) {
  std::ofstream out = open_out(path);
  for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
  out << "# closed=" << (p.closed ? 1 : 0) << "\n";
  out << "index,x,y\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    out << i << "," << format_double(p.points[i].x) << ","
        << format_double(p.points[i].y) << "\n";
}

Polyline read_polyline_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Err::io_error, "cannot read " + path.string());
  Polyline p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("closed=");
      if (pos != std::string::npos) p.closed = line[pos + 7] == '1';
      continue;
    }
    if (line.rfind("index", 0) == 0) continue;
    std::istringstream row(line);
    std::string tok;
    Vec2 q;
    if (!std::getline(row, tok, ',')) continue;
    if (!std::getline(row, tok, ',')) raise(Err::io_error, "bad csv row");
    q.x = std::stod(tok);
    if (!std::getline(row, tok, ',')) raise(Err::io_error, "bad csv row");
    q.y = std::stod(tok);
    p.points.push_back(q);
  }
  if (p.points.empty()) raise(Err::io_error, "empty polyline file");
  return p;
}

void write_support_csv(const std::filesystem::path& path,
                       const SupportCurve& s) {
  std::ofstream out = open_out(path);
  out << "# center=" << format_double(s.center.x) << ","
      << format_double(s.center.y) << "\n";
  out << "theta,h\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << format_double(s.theta(i)) << "," << format_double(s.h[i]) << "\n";
}

void write_arrival_csv(const std::filesystem::path& path,
                       const ArrivalTimeField& f) {
  std::ofstream out = open_out(path);
  out << "x,y,u,mask\n";
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const Vec2 q = f.node(i, j);
      out << format_double(q.x) << "," << format_double(q.y) << ","
          << format_double(f.u[f.idx(i, j)]) << ","
          << int(f.mask[f.idx(i, j)]) << "\n";
    }
}

std::string diagnostics_csv_text(const FlowTrace& trace) {
  std::ostringstream out;
  out << "t,area,length,theta_gauss,ell_minus,ell_plus,width,kappa_min,"
         "kappa_max,iso_ratio\n";
  for (const DiagnosticsRecord& r : trace.diagnostics)
    out << format_double(r.t) << "," << format_double(r.area) << ","
        << format_double(r.length) << "," << format_double(r.theta_gauss)
        << "," << format_double(r.ell_minus) << ","
        << format_double(r.ell_plus) << "," << format_double(r.width) << ","
        << format_double(r.kappa_min) << "," << format_double(r.kappa_max)
        << "," << format_double(r.iso_ratio) << "\n";
  return out.str();
}

namespace {

void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& s,
                        double t) {
  if (const auto* sc = std::get_if<SupportCurve>(&s)) {
    write_support_csv(path, *sc);
    return;
  }
  if (const auto* gc = std::get_if<GraphCurve>(&s)) {
    std::ofstream out = open_out(path);
    out << "# side=" << (gc->side == GraphSide::plus ? "plus" : "minus")
        << "\n";
    out << "y,v\n";
    for (std::size_t i = 0; i < gc->size(); ++i)
      out << format_double(gc->y(i)) << "," << format_double(gc->v[i]) << "\n";
    return;
  }
  if (const auto* tc = std::get_if<TurningAngleCurve>(&s)) {
    std::ofstream out = open_out(path);
    out << "# base=" << format_double(tc->base_point.x) << ","
        << format_double(tc->base_point.y) << "\n";
    out << "# closed=" << (tc->closed ? 1 : 0) << "\n";
    out << "theta,kappa\n";
    for (std::size_t i = 0; i < tc->size(); ++i)
      out << format_double(tc->theta[i]) << "," << format_double(tc->kappa[i])
          << "\n";
    return;
  }
  write_polyline_csv(path, std::get<Polyline>(s), {{"t", format_double(t)}});
}

}  // namespace

void write_trace_dir(const std::filesystem::path& dir,
                     const FlowTrace& trace) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(Err::io_error, "cannot create " + dir.string());

  nlohmann::json meta;
  meta["name"] = trace.name;
  meta["status"] = to_string(trace.status);
  meta["ancient"] = trace.ancient;
  meta["representation"] =
      trace.snapshots.empty() ? "none"
                              : representation_name(trace.snapshots.front());
  meta["times"] = trace.times;
  {
    std::ofstream out = open_out(dir / "trace.json");
    out << meta.dump(2) << "\n";
  }
  for (std::size_t j = 0; j < trace.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof name, "curve_%06zu.csv", j);
    write_snapshot_csv(dir / name, trace.snapshots[j], trace.times[j]);
  }
  std::ofstream out = open_out(dir / "diagnostics.csv");
  out << diagnostics_csv_text(trace);
}

}  // namespace flowlab
