#include <cstdio>
#include <cstdlib>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowlab/scenario.hpp"
#include "flowlab/trace_io.hpp"

namespace {

int cmd_run(const std::vector<std::string>& paths, int jobs,
            const std::string& out_override) {
  using namespace flowlab;
  const char* env_out = std::getenv("FLOWLAB_OUT");

  const auto run_one = [&](const std::string& path) -> int {
    try {
      Scenario sc = load_scenario(path);
      if (!out_override.empty()) sc.out_dir = out_override;
      else if (!sc.out_dir && env_out) sc.out_dir = env_out;
      const RunReport report = run_scenario(sc);
      std::printf("%s\n", report.to_json().c_str());
      return exit_code_for(report);
    } catch (const FlowError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return exit_code_for(e);
    }
  };

  if (jobs <= 1 || paths.size() <= 1) {
    int worst = 0;
    for (const std::string& p : paths) worst = std::max(worst, run_one(p));
    return worst;
  }
  std::vector<std::future<int>> futures;
  futures.reserve(paths.size());
  std::size_t next = 0;
  int worst = 0;
  while (next < paths.size() || !futures.empty()) {
    while (next < paths.size() && futures.size() < std::size_t(jobs))
      futures.push_back(
          std::async(std::launch::async, run_one, paths[next++]));
    worst = std::max(worst, futures.front().get());
    futures.erase(futures.begin());
  }
  return worst;
}

int cmd_audits() {
  for (const flowlab::AuditInfo& a : flowlab::list_audits())
    std::printf("%-26s tol=%-12g %s\n", a.name.c_str(), a.default_tol,
                a.verifies.c_str());
  return 0;
}

int cmd_sample(const std::string& family, double t, std::size_t n,
               const std::vector<double>& clip, double rotation,
               const std::vector<double>& translate, double scale) {
  using namespace flowlab;
  try {
    const auto kind = family_from_string(family);
    if (!kind) {
      std::fprintf(stderr, "error: unknown family '%s'\n", family.c_str());
      return 2;
    }
    ExactFamily f;
    f.kind = *kind;
    f.rotation = rotation;
    f.scale = scale;
    if (translate.size() == 2) f.translation = {translate[0], translate[1]};
    std::optional<ClipBox> box;
    if (clip.size() == 4) box = ClipBox{clip[0], clip[1], clip[2], clip[3]};
    const Polyline p = sample_exact(f, t, n, box);
    std::printf("# family=%s rotation=%s scale=%s t=%s\n", family.c_str(),
                format_double(rotation).c_str(), format_double(scale).c_str(),
                format_double(t).c_str());
    std::printf("# closed=%d\nindex,x,y\n", p.closed ? 1 : 0);
    for (std::size_t i = 0; i < p.size(); ++i)
      std::printf("%zu,%s,%s\n", i, format_double(p.points[i].x).c_str(),
                  format_double(p.points[i].y).c_str());
    return 0;
  } catch (const FlowError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowlab: curve shortening flow laboratory"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run scenario files");
  std::vector<std::string> paths;
  int jobs = 1;
  std::string out_dir;
  run->add_option("scenario", paths, "scenario JSON file(s)")
      ->required()
      ->expected(-1);
  run->add_option("--jobs", jobs, "run scenarios concurrently");
  run->add_option("--out", out_dir, "output directory (overrides scenario)");

  auto* audits = app.add_subcommand("audits", "list registered audits");

  auto* sample =
      app.add_subcommand("sample", "print an exact family slice as CSV");
  std::string family;
  double t = -1.0;
  std::size_t n = 64;
  std::vector<double> clip, translate;
  double rotation = 0.0, scale = 1.0;
  sample->add_option("family", family, "family name")->required();
  sample->add_option("--t", t, "time")->required();
  sample->add_option("--n", n, "node count");
  sample->add_option("--clip", clip, "x_min x_max y_min y_max")->expected(4);
  sample->add_option("--rotation", rotation, "pose rotation (radians)");
  sample->add_option("--translate", translate, "pose translation x y")
      ->expected(2);
  sample->add_option("--scale", scale, "parabolic scale");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(paths, jobs, out_dir);
  if (audits->parsed()) return cmd_audits();
  if (sample->parsed())
    return cmd_sample(family, t, n, clip, rotation, translate, scale);
  return 0;
}
