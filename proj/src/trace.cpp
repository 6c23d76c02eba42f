#include "flowlab/trace.hpp"

namespace flowlab {

const char* to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::completed: return "completed";
    case TraceStatus::extinction_reached: return "extinction_reached";
  }
  return "unknown";
}

void FlowTrace::validate() const {
  if (times.size() != snapshots.size())
    raise(Err::invalid_argument, "trace times/snapshots size mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      raise(Err::invalid_argument, "trace times must strictly increase");
  if (!snapshots.empty()) {
    const std::size_t rep = snapshots.front().index();
    for (const Snapshot& s : snapshots)
      if (s.index() != rep)
        raise(Err::invalid_argument, "mixed snapshot representations");
  }
}

Polyline snapshot_polyline(const Snapshot& s, std::size_t n) {
  if (const auto* sc = std::get_if<SupportCurve>(&s)) {
    if (n == 0 || n == sc->size()) return polyline_from_support(*sc);
    SupportCurve dense = *sc;  // same grid; resample the polyline instead
    Polyline p = polyline_from_support(dense);
    return resample(p, n);
  }
  if (const auto* tc = std::get_if<TurningAngleCurve>(&s)) {
    Polyline p = reconstruct_positions(*tc);
    if (n != 0 && n != p.size()) return resample(p, n);
    return p;
  }
  if (const auto* gc = std::get_if<GraphCurve>(&s)) return gc->polyline();
  return std::get<Polyline>(s);
}

const char* representation_name(const Snapshot& s) {
  switch (s.index()) {
    case 0: return "support";
    case 1: return "kappa";
    case 2: return "graph";
    default: return "polyline";
  }
}

}  // namespace flowlab
