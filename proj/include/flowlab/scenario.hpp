#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/config.hpp"
#include "flowlab/evolver.hpp"
#include "flowlab/trace.hpp"

namespace flowlab {

enum class IntegratorKind { support, kappa, graph, oracle, exact_sampler };

const char* to_string(IntegratorKind k);

// Initial data: an exact family slice, a polyline file, or a support
// function given by Fourier coefficients h = r0 + sum a_k cos k t +
// b_k sin k t (optionally seeded random coefficients).
struct InitialSpec {
  std::optional<ExactFamily> family;
  std::optional<std::string> polyline_csv;
  struct Fourier {
    double r0 = 1.0;
    std::vector<double> a, b;  // k = 1, 2, ...
    std::optional<unsigned> seed;
    std::size_t modes = 0;     // used with seed
    double amplitude = 0.0;
  };
  std::optional<Fourier> fourier;
};

struct AuditRequest {
  std::string name;
  std::optional<double> tol;
  std::optional<std::string> expect;  // verdict-style audits
};

struct Scenario {
  int version = 1;
  std::string name;
  InitialSpec initial;
  IntegratorKind integrator = IntegratorKind::support;
  TimeWindow window;
  StepControl step;
  std::size_t nodes = 256;
  std::optional<ClipBox> clip;
  bool tip_frame_clip = false;
  GraphBoundary graph_bc = GraphBoundary::fixed_ends;
  GraphSide graph_side = GraphSide::plus;
  std::vector<AuditRequest> audits;
  std::optional<std::string> out_dir;
};

// Strict parser: unknown keys, missing required keys or invalid values
// raise config_error.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& json_text);

enum class AuditVerdict { pass, fail, info };

const char* to_string(AuditVerdict v);

struct AuditResult {
  std::string name;
  AuditVerdict verdict = AuditVerdict::info;
  double measured = 0.0;
  double tol = 0.0;
  std::string detail;
};

struct RunReport {
  std::string scenario;
  std::vector<AuditResult> audits;
  double wall_seconds = 0.0;
  std::vector<std::string> artifacts;
  TraceStatus trace_status = TraceStatus::completed;

  bool failed() const;
  std::string to_json() const;
};

struct AuditInfo {
  std::string name;
  std::string verifies;  // the property checked, in words
  double default_tol;
};

// Registered audits, in listing order.
std::vector<AuditInfo> list_audits();

// Build initial data, integrate, fill diagnostics, run the requested
// audits and write artifacts under out_dir (unset = no artifacts).
// Deterministic for a fixed scenario.
RunReport run_scenario(const Scenario& sc,
                       const Tolerances& tol = default_tolerances());

// ConfigError -> 2, audit failure -> 1, IoError -> 3, otherwise 0.
int exit_code_for(const RunReport& report);
int exit_code_for(const FlowError& error);

}  // namespace flowlab
