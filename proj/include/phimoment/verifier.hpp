#pragma once
// Scenario orchestration: computes both sides of each two-sided Phi-moment
// equivalence and emits one RatioReport per scenario.
//
// The left side is always a Monte Carlo (or spectral) estimate of the
// Phi-moment of the statistic; the right side is computed exactly from the
// StepFn calculus of the disjoint sum, so re-running with a different seed
// changes the left side only.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phimoment/classical_mc.hpp"
#include "phimoment/dist_spec.hpp"
#include "phimoment/matrix_model.hpp"
#include "phimoment/orlicz.hpp"
#include "phimoment/step_fn.hpp"

namespace phimoment {

enum class Mode { Classical, Free };
enum class Statistic { Sum, Max, MaximalWitness };

struct SweepSpec {
  std::vector<double> a_values;
  std::vector<int> n_values;
};

struct Scenario {
  std::string id;
  std::string theorem;  // inequality family tag, used for band lookup
  Mode mode = Mode::Classical;
  Statistic statistic = Statistic::Sum;
  std::vector<DistSpec> parts;
  OrliczFn phi = OrliczFn::power(2.0);
  McConfig mc;
  MatrixModelConfig model;
  std::optional<SweepSpec> sweep;
};

struct RatioReport {
  std::string id;
  std::string theorem;
  Mode mode = Mode::Classical;
  Statistic statistic = Statistic::Sum;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs_head = 0.0;
  double rhs_norm_term = 0.0;
  double rhs_total = 0.0;
  double ratio = 1.0;
  double ratio_se = 0.0;
  std::uint64_t seed = 0;
  std::string scenario_hash;
  std::vector<std::string> warnings;
  StepFn disjoint_rearrangement;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[i] = digits[v & 0xF];
  return out;
}

inline std::string describe_parts(std::span<const DistSpec> parts) {
  std::string s;
  for (const auto& d : parts) {
    s += d.symmetrized() ? "s[" : "p[";
    for (const auto& [t, v] : d.rearrangement().to_pairs())
      s += std::to_string(t) + ":" + std::to_string(v) + ",";
    s += "]";
  }
  return s;
}

inline const char* statistic_name(Statistic st) {
  switch (st) {
    case Statistic::Sum: return "sum";
    case Statistic::Max: return "max";
    case Statistic::MaximalWitness: return "maximal_witness";
  }
  return "?";
}

inline const char* mode_name(Mode m) { return m == Mode::Classical ? "classical" : "free"; }

}  // namespace detail

// Seed-independent fingerprint of the scenario setup.
inline std::string scenario_hash(const Scenario& s) {
  std::string desc = s.id + "|" + s.theorem + "|" + detail::mode_name(s.mode) + "|" +
                     detail::statistic_name(s.statistic) + "|" + s.phi.describe() + "|" +
                     detail::describe_parts(s.parts) + "|";
  if (s.mode == Mode::Classical)
    desc += "trials=" + std::to_string(s.mc.trials);
  else
    desc += "N=" + std::to_string(s.model.n_dim) + ",trials=" + std::to_string(s.model.trials);
  if (s.sweep) {
    desc += "|sweep";
    for (double a : s.sweep->a_values) desc += "," + std::to_string(a);
    for (int n : s.sweep->n_values) desc += ";" + std::to_string(n);
  }
  return detail::hex64(detail::fnv1a(desc));
}

namespace detail {

inline void flag_delta2(const OrliczFn& phi, std::vector<std::string>& warnings) {
  bool ok;
  if (auto exact = phi.delta2_exact(); exact.has_value()) {
    ok = *exact;
  } else {
    const auto grid = default_delta2_grid();
    ok = delta2_probe(phi, grid).satisfied;
  }
  if (!ok) warnings.push_back("delta2_violated");
}

// Empirical Jensen: mean Phi(S) >= Phi(mean S) holds exactly for convex Phi
// on the sample measure; a violation beyond tolerance is a numeric failure.
inline void jensen_guard(const OrliczFn& phi, double lhs, double mean_stat) {
  if (!phi.is_convex()) return;
  const double bound = phi(std::abs(mean_stat));
  if (lhs < bound - 1e-9 * (1.0 + std::abs(bound)))
    throw std::runtime_error("jensen_guard: E Phi(S) < Phi(E S)");
}

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  double stat_mean = 0.0;
};

template <typename StatFn>
McEstimate classical_phi_estimate(const Scenario& s, StatFn&& statistic) {
  std::vector<double> phis(s.mc.trials);
  std::vector<double> stats(s.mc.trials);
  parallel_for_trials(s.mc.trials, s.mc.workers, [&](long t) {
    const bool mirror = s.mc.antithetic && (t & 1);
    const std::uint64_t stream_trial =
        s.mc.antithetic ? static_cast<std::uint64_t>(t / 2) : static_cast<std::uint64_t>(t);
    double acc = 0.0;
    for (std::size_t k = 0; k < s.parts.size(); ++k) {
      StreamRng rng(s.mc.seed, stream_trial, k);
      const double v =
          mirror ? sample_dist_antithetic(s.parts[k], rng) : sample_dist(s.parts[k], rng);
      acc = statistic(acc, v, k == 0);
    }
    stats[t] = acc;
    phis[t] = s.phi(std::abs(acc));
  }, s.mc.batch);
  McEstimate est;
  long double m = 0.0L, ms = 0.0L;
  for (long t = 0; t < s.mc.trials; ++t) {
    m += phis[t];
    ms += stats[t];
  }
  est.mean = static_cast<double>(m / s.mc.trials);
  est.stat_mean = static_cast<double>(ms / s.mc.trials);
  long double s2 = 0.0L;
  for (long t = 0; t < s.mc.trials; ++t) {
    const long double d = phis[t] - est.mean;
    s2 += d * d;
  }
  if (s.mc.trials > 1)
    est.se = std::sqrt(static_cast<double>(s2 / (s.mc.trials - 1) / s.mc.trials));
  return est;
}

inline RatioReport assemble(const Scenario& s, double lhs, double lhs_se, double head_term,
                            double norm_term, StepFn X) {
  RatioReport r;
  r.id = s.id;
  r.theorem = s.theorem;
  r.mode = s.mode;
  r.statistic = s.statistic;
  r.lhs = lhs;
  r.lhs_se = lhs_se;
  r.rhs_head = head_term;
  r.rhs_norm_term = norm_term;
  r.rhs_total = head_term + norm_term;
  if (r.rhs_total > 0.0) {
    r.ratio = lhs / r.rhs_total;
    r.ratio_se = lhs_se / r.rhs_total;
  } else {
    r.ratio = 1.0;  // degenerate all-zero scenario
    r.ratio_se = 0.0;
  }
  r.seed = s.mode == Mode::Classical ? s.mc.seed : s.model.seed;
  r.scenario_hash = scenario_hash(s);
  r.disjoint_rearrangement = std::move(X);
  flag_delta2(s.phi, r.warnings);
  return r;
}

}  // namespace detail

// E Phi(sum f_k) against Phi-moment of the head plus Phi(||X||_1), positive
// independent parts.
inline RatioReport verify_classical_positive(const Scenario& s) {
  if (s.mode != Mode::Classical || s.statistic != Statistic::Sum)
    throw std::invalid_argument("verify_classical_positive: wrong scenario shape");
  for (const auto& d : s.parts)
    if (d.symmetrized())
      throw std::invalid_argument("verify_classical_positive: parts must be positive");
  const StepFn X = disjoint_sum_rearrangement(s.parts);
  const auto [head, tail] = head_tail_split(X);
  const double head_term = phi_moment(s.phi, head);
  const double norm_term = s.phi(X.integral());
  const auto est = detail::classical_phi_estimate(
      s, [](double acc, double v, bool) { return acc + v; });
  detail::jensen_guard(s.phi, est.mean, est.stat_mean);
  return detail::assemble(s, est.mean, est.se, head_term, norm_term, X);
}

// Symmetric variant: the norm term uses the Holmstedt L1+L2 expression.
inline RatioReport verify_classical_symmetric(const Scenario& s) {
  if (s.mode != Mode::Classical || s.statistic != Statistic::Sum)
    throw std::invalid_argument("verify_classical_symmetric: wrong scenario shape");
  for (const auto& d : s.parts)
    if (!d.symmetrized() && !d.is_zero())
      throw std::invalid_argument("verify_classical_symmetric: parts must be symmetrized");
  const StepFn X = disjoint_sum_rearrangement(s.parts);
  const auto [head, tail] = head_tail_split(X);
  const double head_term = phi_moment(s.phi, head);
  const double norm_term = s.phi(composite_norm(X, CompositeNorm::L1PlusL2Holmstedt));
  const auto est = detail::classical_phi_estimate(
      s, [](double acc, double v, bool) { return acc + v; });
  detail::jensen_guard(s.phi, est.mean, est.stat_mean);
  return detail::assemble(s, est.mean, est.se, head_term, norm_term, X);
}

// E Phi(max f_k) against the head term alone.
inline RatioReport verify_classical_max(const Scenario& s) {
  if (s.mode != Mode::Classical || s.statistic != Statistic::Max)
    throw std::invalid_argument("verify_classical_max: wrong scenario shape");
  for (const auto& d : s.parts)
    if (d.symmetrized())
      throw std::invalid_argument("verify_classical_max: maximum requires positive parts");
  const StepFn X = disjoint_sum_rearrangement(s.parts);
  const auto [head, tail] = head_tail_split(X);
  const double head_term = phi_moment(s.phi, head);
  const auto est = detail::classical_phi_estimate(
      s, [](double acc, double v, bool first) { return first ? v : std::max(acc, v); });
  detail::jensen_guard(s.phi, est.mean, est.stat_mean);
  return detail::assemble(s, est.mean, est.se, head_term, 0.0, X);
}

// Free sum: spectral Phi-mean of the matrix model against the same exact
// right side (head + norm term; Holmstedt in the symmetric case).
inline RatioReport verify_free(const Scenario& s) {
  if (s.mode != Mode::Free || s.statistic != Statistic::Sum)
    throw std::invalid_argument("verify_free: wrong scenario shape");
  bool any_sym = false, any_pos = false;
  for (const auto& d : s.parts) {
    if (d.is_zero()) continue;
    (d.symmetrized() ? any_sym : any_pos) = true;
  }
  if (any_sym && any_pos)
    throw std::invalid_argument("verify_free: mixed positive/symmetrized family");
  const StepFn X = disjoint_sum_rearrangement(s.parts);
  const auto [head, tail] = head_tail_split(X);
  const double head_term = phi_moment(s.phi, head);
  const double norm_term =
      any_sym ? s.phi(composite_norm(X, CompositeNorm::L1PlusL2Holmstedt)) : s.phi(X.integral());

  const SpectralSample spectrum = free_sum_spectrum(std::span<const DistSpec>(s.parts), s.model);
  if (!any_sym && spectrum.trials > 0) {
    const double scale = std::max(1.0, X.sup());
    if (spectrum.min_eigenvalue() < -1e-7 * scale)
      throw std::runtime_error("verify_free: positive model produced negative spectrum");
  }
  const auto& phi = s.phi;
  const auto [lhs, lhs_se] = spectrum.trace_mean_se([&](double v) { return phi(std::abs(v)); });
  const auto [stat_mean, stat_se] = spectrum.trace_mean_se([](double v) { return v; });
  detail::jensen_guard(s.phi, lhs, stat_mean);
  return detail::assemble(s, lhs, lhs_se, head_term, norm_term, X);
}

// Explicit maximal witness a = sum_k x_k e_(thr,inf)(x_k) + thr, with
// thr = mu(1, X); atoms exactly at the threshold are split so the kept mass
// is exactly the head measure.
inline RatioReport verify_free_maximal(const Scenario& s) {
  if (s.mode != Mode::Free || s.statistic != Statistic::MaximalWitness)
    throw std::invalid_argument("verify_free_maximal: wrong scenario shape");
  for (const auto& d : s.parts)
    if (d.symmetrized())
      throw std::invalid_argument("verify_free_maximal: positive parts required");
  const StepFn X = disjoint_sum_rearrangement(s.parts);
  const auto [head, tail] = head_tail_split(X);
  const double head_term = phi_moment(s.phi, head);
  if (X.is_zero()) return detail::assemble(s, 0.0, 0.0, 0.0, 0.0, X);

  const double thr = X.value_at(1.0);
  const int n = s.model.n_dim;
  std::vector<DiagonalPart> dps;
  dps.reserve(s.parts.size());
  for (const auto& d : s.parts) dps.push_back(DiagonalPart::from_dist(d, n));

  // Entries strictly above the threshold always survive; threshold entries
  // fill the remaining head quota in part order.
  const double hi = thr + 1e-9 * std::max(1.0, thr);
  const double lo = thr - 1e-9 * std::max(1.0, thr);
  long target = X.support_end() >= 1.0 - 1e-12
                    ? n
                    : std::lround(X.support_end() * n);
  long above = 0;
  for (const auto& p : dps)
    for (double v : p.values)
      if (v > hi) ++above;
  long quota = std::max<long>(0, target - above);
  std::vector<DiagonalPart> kept;
  kept.reserve(dps.size());
  for (const auto& p : dps) {
    DiagonalPart q;
    q.n_dim = p.n_dim;
    for (double v : p.values) {
      if (v > hi) {
        q.values.push_back(v);
      } else if (v >= lo && quota > 0) {
        q.values.push_back(v);
        --quota;
      }
    }
    kept.push_back(std::move(q));
  }

  const SpectralSample spectrum = free_sum_spectrum(std::span<const DiagonalPart>(kept), s.model);
  const auto& phi = s.phi;
  const auto [lhs, lhs_se] =
      spectrum.trace_mean_se([&](double v) { return phi(std::abs(v + thr)); });
  return detail::assemble(s, lhs, lhs_se, head_term, 0.0, X);
}

inline RatioReport verify_scenario(const Scenario& s) {
  if (s.mode == Mode::Classical) {
    if (s.statistic == Statistic::Max) return verify_classical_max(s);
    bool any_sym = false;
    for (const auto& d : s.parts) any_sym = any_sym || d.symmetrized();
    return any_sym ? verify_classical_symmetric(s) : verify_classical_positive(s);
  }
  if (s.statistic == Statistic::MaximalWitness) return verify_free_maximal(s);
  return verify_free(s);
}

struct SweepRow {
  double a = 0.0;
  int n = 0;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double denominator = 0.0;  // Phi-moment of the disjoint sum = Phi(a)
  double ratio = 0.0;
};

// Sharpness sweep: parts are n copies of a*chi_(0,1/n], so the disjoint sum
// is the constant a on (0,1] and the reported ratio is E Phi(S) / Phi(a).
// Delta_2 functions keep the ratio bounded in a; exp-like functions blow up.
inline std::vector<SweepRow> sharpness_sweep(const OrliczFn& phi,
                                             std::span<const double> a_values,
                                             std::span<const int> n_values, Mode mode,
                                             const McConfig& mc,
                                             const MatrixModelConfig& model) {
  std::vector<SweepRow> rows;
  for (int n : n_values) {
    for (double a : a_values) {
      Scenario s;
      s.id = "sweep";
      s.phi = phi;
      s.mc = mc;
      s.model = model;
      s.parts.assign(static_cast<std::size_t>(n), DistSpec::scaled_indicator(a, 1.0 / n));
      SweepRow row;
      row.a = a;
      row.n = n;
      row.denominator = phi(a);
      if (mode == Mode::Classical) {
        const auto est = detail::classical_phi_estimate(
            s, [](double acc, double v, bool) { return acc + v; });
        row.lhs = est.mean;
        row.lhs_se = est.se;
      } else {
        const SpectralSample spectrum =
            free_sum_spectrum(std::span<const DistSpec>(s.parts), model);
        const auto [m, se] = spectrum.trace_mean_se([&](double v) { return phi(std::abs(v)); });
        row.lhs = m;
        row.lhs_se = se;
      }
      row.ratio = row.denominator > 0 ? row.lhs / row.denominator : 1.0;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace phimoment
