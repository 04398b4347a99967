#pragma once
// Batch runner shared by the CLI and the acceptance suite: executes a
// parsed config scenario by scenario and writes reports, the summary table
// and sweep plot data.  All file writes happen on the calling thread after
// the deterministic merge.

#include <filesystem>
#include <fnmatch.h>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include "phimoment/scenario_io.hpp"

namespace phimoment {

struct RunOutcome {
  std::vector<ScenarioResult> results;
  bool all_pass = true;
};

inline RunOutcome run_suite(const RunConfig& cfg, const std::string& filter = "",
                            std::ostream* log = nullptr) {
  RunOutcome out;
  for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
    const Scenario& s = cfg.scenarios[i];
    if (!filter.empty() && fnmatch(filter.c_str(), s.id.c_str(), 0) != 0) continue;
    ScenarioResult res = run_scenario(s, cfg.expects[i], cfg.baselines);
    out.all_pass = out.all_pass && res.pass;
    if (log)
      *log << (res.pass ? "pass " : "FAIL ") << s.id << "  ratio=" << res.report.ratio
           << " (se " << res.report.ratio_se << ")" << std::endl;
    out.results.push_back(std::move(res));
  }
  return out;
}

struct RunManifest {
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed_override;
  int workers = 0;
  std::string format = "json";  // json | csv
  std::string filter;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

inline void write_outputs(const RunOutcome& out, const RunManifest& manifest) {
  namespace fs = std::filesystem;
  const fs::path dir(manifest.output_dir);
  fs::create_directories(dir / "reports");
  bool any_sweep = false;
  for (const auto& res : out.results) any_sweep = any_sweep || !res.sweep.empty();
  if (any_sweep) fs::create_directories(dir / "plotdata");

  // Manifest echoed for provenance.
  std::string mf = "{\n";
  mf += "  \"config_path\": " + detail::json_escape(manifest.config_path) + ",\n";
  mf += "  \"output_dir\": " + detail::json_escape(manifest.output_dir) + ",\n";
  mf += "  \"seed_override\": " +
        (manifest.seed_override ? std::to_string(*manifest.seed_override) : std::string("null")) +
        ",\n";
  mf += "  \"workers\": " + std::to_string(manifest.workers) + ",\n";
  mf += "  \"format\": " + detail::json_escape(manifest.format) + ",\n";
  mf += "  \"filter\": " + detail::json_escape(manifest.filter) + "\n}\n";
  write_file(dir / "manifest.json", mf);

  for (const auto& res : out.results) {
    if (manifest.format == "csv")
      write_file(dir / "reports" / (res.report.id + ".csv"), report_to_csv(res));
    else
      write_file(dir / "reports" / (res.report.id + ".json"), report_to_json(res));
    if (!res.sweep.empty())
      write_file(dir / "plotdata" / (res.report.id + ".csv"), plotdata_csv(res));
  }
  write_file(dir / "summary.csv", summary_csv(out.results));
}

}  // namespace phimoment
