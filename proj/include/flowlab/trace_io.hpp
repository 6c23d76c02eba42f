#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "flowlab/arrival.hpp"
#include "flowlab/trace.hpp"

namespace flowlab {

// Deterministic float formatting (%.17g) used by every writer, so repeated
// runs produce byte-identical artifacts.
std::string format_double(double v);

// `index,x,y` rows behind `#` comment lines carrying the metadata.
void write_polyline_csv(const std::filesystem::path& path, const Polyline& p,
                        const std::map<std::string, std::string>& meta = {});
Polyline read_polyline_csv(const std::filesystem::path& path);

// `theta,h` rows.
void write_support_csv(const std::filesystem::path& path,
                       const SupportCurve& s);

// `x,y,u,mask` rows.
void write_arrival_csv(const std::filesystem::path& path,
                       const ArrivalTimeField& f);

// Directory layout: trace.json (metadata + times), curve_%06zu.csv per
// snapshot, diagnostics.csv (one row per time).
void write_trace_dir(const std::filesystem::path& dir, const FlowTrace& trace);

std::string diagnostics_csv_text(const FlowTrace& trace);

}  // namespace flowlab
