#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "flowlab/curve.hpp"

namespace flowlab {

// Monitored quantities for one snapshot. Fields that do not apply to a
// representation (area of an open curve without axis crossings, Gaussian
// area at t >= 0, ...) are NaN.
struct DiagnosticsRecord {
  double t = 0.0;
  double area = 0.0;        // enclosed (compact) or clipped below y=0
  double length = 0.0;
  double theta_gauss = 0.0; // Gaussian area
  double ell_minus = 0.0;   // max of -y
  double ell_plus = 0.0;    // max of +y
  double width = 0.0;       // horizontal extent
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double iso_ratio = 0.0;   // L^2 / (4 pi A), closed curves
};

using Snapshot =
    std::variant<SupportCurve, TurningAngleCurve, GraphCurve, Polyline>;

enum class TraceStatus { completed, extinction_reached };

const char* to_string(TraceStatus s);

// Time-stamped sequence of curve snapshots. All snapshots of one trace
// share the representation, orientation and grid layout.
struct FlowTrace {
  std::vector<double> times;
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRecord> diagnostics;  // filled on demand
  TraceStatus status = TraceStatus::completed;
  // Data sampled from (or evolved from) an exact ancient family; several
  // monotonicity audits are only asserted under this hypothesis.
  bool ancient = false;
  std::string name;

  std::size_t size() const { return times.size(); }
  void validate() const;
};

// Uniform polyline view of any snapshot; `n` applies to the
// support/turning-angle conversions (graph and polyline snapshots keep
// their own nodes).
Polyline snapshot_polyline(const Snapshot& s, std::size_t n = 0);

const char* representation_name(const Snapshot& s);

}  // namespace flowlab
