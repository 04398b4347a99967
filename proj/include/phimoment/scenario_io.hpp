#pragma once
// Scenario config ingestion and report emission.
//
// Configs are a single JSON document {baselines, defaults, scenarios:[...]}
// (schema in README).  Reports are serialized with a fixed key order and
// floats at 17 significant digits, so identical manifest + seed reproduces
// byte-identical output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "phimoment/verifier.hpp"

namespace phimoment {

// ---------------------------------------------------------------------------
// errors mapped to CLI exit codes

struct ConfigParseError : std::runtime_error {  // exit 2
  using std::runtime_error::runtime_error;
};
struct ScenarioValidationError : std::runtime_error {  // exit 3
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {  // exit 4
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// baselines: pilot-calibrated pass bands per inequality family

struct FamilyBand {
  double C = 4.0;                    // ratio must lie in [1/C, C * upper_factor]
  double upper_factor = 1.0;         // 64 for the maximal-witness family
  std::optional<double> hard_lower;  // explicit lower-direction constant
};

struct Baselines {
  std::map<std::string, FamilyBand> families;
};

struct ScenarioResult {
  RatioReport report;
  std::vector<SweepRow> sweep;
  std::optional<std::string> expect;  // "increasing" | "bounded" for sweeps
  double band_lo = 0.0;
  double band_hi = 0.0;
  std::optional<double> hard_lower;
  bool pass = true;
  std::vector<std::string> failures;
};

struct RunConfig {
  std::vector<Scenario> scenarios;
  std::vector<std::optional<std::string>> expects;  // parallel to scenarios
  Baselines baselines;
};

// ---------------------------------------------------------------------------
// parsing

namespace detail {

using nlohmann::json;

inline std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigParseError(what + ": parse error at line " + std::to_string(line) +
                           ", column " + std::to_string(col) + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigParseError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline OrliczFn parse_phi(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigParseError("phi: expected object with a 'kind' field");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "power") return OrliczFn::power(j.at("p").get<double>());
    if (kind == "power_log") return OrliczFn::power_log(j.at("p").get<double>());
    if (kind == "exp_minus_one") return OrliczFn::exp_minus_one(j.value("scale", 1.0));
    if (kind == "tabulated") {
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : j.at("points")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      return OrliczFn::tabulated(std::move(pts));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigParseError(std::string("phi: ") + e.what());
  }
  throw ConfigParseError("phi: unknown kind '" + kind + "'");
}

inline void parse_parts(const json& arr, std::vector<DistSpec>& out) {
  if (!arr.is_array()) throw ConfigParseError("parts: expected an array");
  for (const auto& j : arr) {
    const std::string kind = j.at("kind").get<std::string>();
    const bool sym = j.value("symmetrized", false);
    const int copies = j.value("copies", 1);
    if (copies < 1) throw ConfigParseError("parts: copies must be >= 1");
    DistSpec d = [&] {
      try {
        if (kind == "atoms") {
          std::vector<std::pair<double, double>> atoms;
          for (const auto& a : j.at("atoms"))
            atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
          return DistSpec::atoms(std::move(atoms), sym);
        }
        if (kind == "scaled_indicator")
          return DistSpec::scaled_indicator(j.at("a").get<double>(), j.at("u").get<double>(), sym);
        if (kind == "inverse_cdf") {
          std::vector<Step> breaks;
          for (const auto& b : j.at("breaks"))
            breaks.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
          return DistSpec::inverse_cdf(StepFn::from_breaks(std::move(breaks)), sym);
        }
        throw ConfigParseError("parts: unknown kind '" + kind + "'");
      } catch (const std::invalid_argument& e) {
        throw ConfigParseError(std::string("parts: ") + e.what());
      }
    }();
    for (int c = 0; c < copies; ++c) out.push_back(d);
  }
}

inline Mode parse_mode(const std::string& s) {
  if (s == "classical") return Mode::Classical;
  if (s == "free") return Mode::Free;
  throw ConfigParseError("mode: expected 'classical' or 'free', got '" + s + "'");
}

inline Statistic parse_statistic(const std::string& s) {
  if (s == "sum") return Statistic::Sum;
  if (s == "max") return Statistic::Max;
  if (s == "maximal_witness") return Statistic::MaximalWitness;
  throw ConfigParseError("statistic: unknown value '" + s + "'");
}

}  // namespace detail

inline Baselines parse_baselines(const std::string& text) {
  const auto j = detail::parse_json_text(text, "baselines");
  Baselines b;
  if (!j.contains("families")) return b;
  for (const auto& [name, fam] : j.at("families").items()) {
    FamilyBand band;
    band.C = fam.at("C").get<double>();
    band.upper_factor = fam.value("upper_factor", 1.0);
    if (fam.contains("hard_lower")) band.hard_lower = fam.at("hard_lower").get<double>();
    if (!(band.C >= 1.0)) throw ConfigParseError("baselines: C must be >= 1 for " + name);
    b.families[name] = band;
  }
  return b;
}

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  int workers = 0;
};

inline RunConfig parse_config(const std::string& text, const std::filesystem::path& config_dir,
                              const ConfigOverrides& overrides = {}) {
  const auto j = detail::parse_json_text(text, "config");
  RunConfig cfg;

  long def_trials = 100000;
  std::uint64_t def_seed = 1;
  int def_n_dim = 1024, def_matrix_trials = 32;
  if (j.contains("defaults")) {
    const auto& d = j.at("defaults");
    def_trials = d.value("trials", def_trials);
    def_seed = d.value("seed", def_seed);
    def_n_dim = d.value("n_dim", def_n_dim);
    def_matrix_trials = d.value("matrix_trials", def_matrix_trials);
  }
  if (j.contains("baselines")) {
    const auto path = config_dir / j.at("baselines").get<std::string>();
    cfg.baselines = parse_baselines(detail::read_file(path));
  }
  if (!j.contains("scenarios") || !j.at("scenarios").is_array())
    throw ConfigParseError("config: missing 'scenarios' array");

  try {
    for (const auto& js : j.at("scenarios")) {
      Scenario s;
      s.id = js.at("id").get<std::string>();
      s.theorem = js.value("theorem", std::string("unspecified"));
      s.mode = detail::parse_mode(js.value("mode", std::string("classical")));
      s.statistic = detail::parse_statistic(js.value("statistic", std::string("sum")));
      s.phi = detail::parse_phi(js.at("phi"));
      if (js.contains("parts")) detail::parse_parts(js.at("parts"), s.parts);
      s.mc.trials = js.value("trials", def_trials);
      s.mc.seed = overrides.seed.value_or(js.value("seed", def_seed));
      s.mc.antithetic = js.value("antithetic", false);
      s.mc.batch = js.value("batch", 0);
      s.mc.workers = overrides.workers;
      s.model.n_dim = js.value("n_dim", def_n_dim);
      s.model.trials = js.value("matrix_trials", def_matrix_trials);
      s.model.seed = s.mc.seed;
      s.model.workers = overrides.workers;
      std::optional<std::string> expect;
      if (js.contains("sweep")) {
        SweepSpec sw;
        for (const auto& a : js.at("sweep").at("a_values")) sw.a_values.push_back(a.get<double>());
        for (const auto& n : js.at("sweep").at("n_values")) sw.n_values.push_back(n.get<int>());
        if (sw.a_values.empty() || sw.n_values.empty())
          throw ConfigParseError("sweep: a_values and n_values must be non-empty");
        s.sweep = std::move(sw);
        expect = js.value("expect", std::string("increasing"));
        if (*expect != "increasing" && *expect != "bounded")
          throw ConfigParseError("expect: must be 'increasing' or 'bounded'");
      }
      cfg.scenarios.push_back(std::move(s));
      cfg.expects.push_back(std::move(expect));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError(std::string("config: ") + e.what());
  }
  return cfg;
}

// Semantic validation beyond schema shape; throws ScenarioValidationError
// naming the scenario id.
inline void validate_scenario(const Scenario& s) {
  auto fail = [&](const std::string& msg) {
    throw ScenarioValidationError("scenario '" + s.id + "': " + msg);
  };
  if (s.sweep) {
    if (s.statistic != Statistic::Sum) fail("sweeps use the sum statistic");
    return;  // parts are generated per sweep point
  }
  if (s.parts.empty()) fail("no parts");
  bool any_sym = false, any_pos = false;
  for (const auto& d : s.parts) {
    if (d.is_zero()) continue;
    (d.symmetrized() ? any_sym : any_pos) = true;
  }
  if (s.statistic == Statistic::Max) {
    if (s.mode != Mode::Classical) fail("max statistic is classical-only");
    if (any_sym) fail("max statistic requires positive parts");
  }
  if (s.statistic == Statistic::MaximalWitness) {
    if (s.mode != Mode::Free) fail("maximal_witness is free-mode only");
    if (any_sym) fail("maximal_witness requires positive parts");
  }
  if (s.mode == Mode::Free) {
    if (any_sym && any_pos) fail("free families must be all positive or all symmetrized");
    if (s.model.n_dim < 64) fail("free mode requires n_dim >= 64");
  }
}

// ---------------------------------------------------------------------------
// pass/fail evaluation

inline constexpr double kSweepIncreaseFactor = 10.0;   // last/first for non-Delta2 blow-up
inline constexpr double kSweepBoundedVariation = 0.25; // max relative spread for Delta2

inline void evaluate_sweep(ScenarioResult& res) {
  const std::string expect = res.expect.value_or("increasing");
  std::map<int, std::vector<const SweepRow*>> by_n;
  for (const auto& row : res.sweep) by_n[row.n].push_back(&row);
  for (const auto& [n, rows] : by_n) {
    if (expect == "increasing") {
      for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i]->ratio > rows[i - 1]->ratio))
          res.failures.push_back("ratio not strictly increasing at n=" + std::to_string(n));
      if (rows.back()->ratio < kSweepIncreaseFactor * rows.front()->ratio)
        res.failures.push_back("blow-up below factor 10 at n=" + std::to_string(n));
    } else {
      double lo = rows.front()->ratio, hi = rows.front()->ratio;
      for (const auto* r : rows) {
        lo = std::min(lo, r->ratio);
        hi = std::max(hi, r->ratio);
      }
      if (!(lo > 0.0) || (hi - lo) / lo > kSweepBoundedVariation)
        res.failures.push_back("ratio varies by more than 25% at n=" + std::to_string(n));
    }
  }
  res.pass = res.failures.empty();
}

inline void evaluate_band(ScenarioResult& res, const Baselines& baselines) {
  const auto it = baselines.families.find(res.report.theorem);
  if (it == baselines.families.end()) {
    res.band_lo = 0.0;
    res.band_hi = 0.0;
    return;  // unbanded family: informational only
  }
  const FamilyBand& fam = it->second;
  res.band_lo = 1.0 / fam.C;
  res.band_hi = fam.C * fam.upper_factor;
  res.hard_lower = fam.hard_lower;
  const double slack = 3.0 * res.report.ratio_se;
  const double r = res.report.ratio;
  if (!std::isfinite(r)) {
    res.failures.push_back("ratio is not finite");
  } else {
    if (r < res.band_lo - slack) res.failures.push_back("ratio below band");
    if (r > res.band_hi + slack) res.failures.push_back("ratio above band");
    if (res.hard_lower && r < *res.hard_lower - slack)
      res.failures.push_back("hard lower-direction constant violated");
  }
  res.pass = res.failures.empty();
}

inline ScenarioResult run_scenario(const Scenario& s, const std::optional<std::string>& expect,
                                   const Baselines& baselines) {
  validate_scenario(s);
  ScenarioResult res;
  res.expect = expect;
  try {
    if (s.sweep) {
      res.sweep = sharpness_sweep(s.phi, s.sweep->a_values, s.sweep->n_values, s.mode, s.mc,
                                  s.model);
      res.report.id = s.id;
      res.report.theorem = s.theorem;
      res.report.mode = s.mode;
      res.report.statistic = s.statistic;
      res.report.seed = s.mode == Mode::Classical ? s.mc.seed : s.model.seed;
      res.report.scenario_hash = scenario_hash(s);
      detail::flag_delta2(s.phi, res.report.warnings);
      if (!res.sweep.empty()) {
        res.report.lhs = res.sweep.back().lhs;
        res.report.rhs_total = res.sweep.back().denominator;
        res.report.ratio =
            res.sweep.front().ratio > 0 ? res.sweep.back().ratio / res.sweep.front().ratio : 0.0;
      }
      evaluate_sweep(res);
    } else {
      res.report = verify_scenario(s);
      evaluate_band(res, baselines);
    }
  } catch (const std::runtime_error& e) {
    throw NumericError("scenario '" + s.id + "': " + e.what());
  }
  if (!std::isfinite(res.report.lhs)) throw NumericError("scenario '" + s.id + "': lhs not finite");
  return res;
}

// ---------------------------------------------------------------------------
// serialization (fixed key order, 17 significant digits)

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string report_to_json(const ScenarioResult& res) {
  using detail::fmt_double;
  const RatioReport& r = res.report;
  std::string out = "{\n";
  out += "  \"id\": " + detail::json_escape(r.id) + ",\n";
  out += "  \"theorem\": " + detail::json_escape(r.theorem) + ",\n";
  out += std::string("  \"mode\": \"") + detail::mode_name(r.mode) + "\",\n";
  out += std::string("  \"statistic\": \"") + detail::statistic_name(r.statistic) + "\",\n";
  out += "  \"seed\": " + std::to_string(r.seed) + ",\n";
  out += "  \"scenario_hash\": " + detail::json_escape(r.scenario_hash) + ",\n";
  out += "  \"lhs\": " + fmt_double(r.lhs) + ",\n";
  out += "  \"lhs_se\": " + fmt_double(r.lhs_se) + ",\n";
  out += "  \"rhs_head\": " + fmt_double(r.rhs_head) + ",\n";
  out += "  \"rhs_norm_term\": " + fmt_double(r.rhs_norm_term) + ",\n";
  out += "  \"rhs_total\": " + fmt_double(r.rhs_total) + ",\n";
  out += "  \"ratio\": " + fmt_double(r.ratio) + ",\n";
  out += "  \"ratio_se\": " + fmt_double(r.ratio_se) + ",\n";
  out += "  \"band\": [" + fmt_double(res.band_lo) + ", " + fmt_double(res.band_hi) + "],\n";
  out += "  \"hard_lower\": " + (res.hard_lower ? fmt_double(*res.hard_lower) : "null") + ",\n";
  out += std::string("  \"pass\": ") + (res.pass ? "true" : "false") + ",\n";
  out += "  \"warnings\": [";
  for (std::size_t i = 0; i < r.warnings.size(); ++i)
    out += (i ? ", " : "") + detail::json_escape(r.warnings[i]);
  out += "],\n";
  out += "  \"failures\": [";
  for (std::size_t i = 0; i < res.failures.size(); ++i)
    out += (i ? ", " : "") + detail::json_escape(res.failures[i]);
  out += "],\n";
  out += "  \"rearrangement\": [";
  const auto pairs = r.disjoint_rearrangement.to_pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) out += ", ";
    out += "[" + fmt_double(pairs[i].first) + ", " + fmt_double(pairs[i].second) + "]";
  }
  out += "],\n";
  out += "  \"sweep\": [";
  for (std::size_t i = 0; i < res.sweep.size(); ++i) {
    const auto& row = res.sweep[i];
    if (i) out += ", ";
    out += "{\"a\": " + fmt_double(row.a) + ", \"n\": " + std::to_string(row.n) +
           ", \"lhs\": " + fmt_double(row.lhs) + ", \"lhs_se\": " + fmt_double(row.lhs_se) +
           ", \"denominator\": " + fmt_double(row.denominator) +
           ", \"ratio\": " + fmt_double(row.ratio) + "}";
  }
  out += "]\n}\n";
  return out;
}

inline std::string report_to_csv(const ScenarioResult& res) {
  using detail::fmt_double;
  const RatioReport& r = res.report;
  std::string out = "key,value\n";
  out += "id," + r.id + "\n";
  out += "theorem," + r.theorem + "\n";
  out += std::string("mode,") + detail::mode_name(r.mode) + "\n";
  out += std::string("statistic,") + detail::statistic_name(r.statistic) + "\n";
  out += "seed," + std::to_string(r.seed) + "\n";
  out += "scenario_hash," + r.scenario_hash + "\n";
  out += "lhs," + fmt_double(r.lhs) + "\n";
  out += "lhs_se," + fmt_double(r.lhs_se) + "\n";
  out += "rhs_head," + fmt_double(r.rhs_head) + "\n";
  out += "rhs_norm_term," + fmt_double(r.rhs_norm_term) + "\n";
  out += "rhs_total," + fmt_double(r.rhs_total) + "\n";
  out += "ratio," + fmt_double(r.ratio) + "\n";
  out += "ratio_se," + fmt_double(r.ratio_se) + "\n";
  out += "pass," + std::string(res.pass ? "1" : "0") + "\n";
  return out;
}

inline std::string summary_csv(std::span<const ScenarioResult> results) {
  using detail::fmt_double;
  std::string out = "id,theorem,ratio,ratio_se,band_lo,band_hi,hard_lower,pass\n";
  for (const auto& res : results) {
    out += res.report.id + "," + res.report.theorem + "," + fmt_double(res.report.ratio) + "," +
           fmt_double(res.report.ratio_se) + "," + fmt_double(res.band_lo) + "," +
           fmt_double(res.band_hi) + "," +
           (res.hard_lower ? fmt_double(*res.hard_lower) : "") + "," +
           (res.pass ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string plotdata_csv(const ScenarioResult& res) {
  std::string out = "a,n,ratio\n";
  for (const auto& row : res.sweep)
    out += detail::fmt_double(row.a) + "," + std::to_string(row.n) + "," +
           detail::fmt_double(row.ratio) + "\n";
  return out;
}

}  // namespace phimoment
