#pragma once
// Monte Carlo engine for classical independence: independent sums, maxima,
// and the compound-Poissonization operator K f = sum_{k<=N} f_k with
// N ~ Poisson(1) and f_k independent copies of f.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phimoment/dist_spec.hpp"
#include "phimoment/empirical.hpp"
#include "phimoment/parallel.hpp"
#include "phimoment/rng.hpp"

namespace phimoment {

struct McConfig {
  long trials = 100000;
  std::uint64_t seed = 1;
  int batch = 0;  // trials per worker chunk; 0 = scheduler default
  bool antithetic = false;
  int workers = 0;
};

// One draw from d using the stream for (seed, trial, var).
inline double sample_dist(const DistSpec& d, StreamRng& rng) {
  const double u = rng.uniform01();
  const double s = d.symmetrized() ? rng.sign() : 1.0;
  return d.quantile_draw(u, s);
}

namespace detail {

// Mirrors a draw for antithetic pairing: uniform -> 1-u, sign flipped.
inline double sample_dist_antithetic(const DistSpec& d, StreamRng& rng) {
  double u = 1.0 - rng.uniform01();
  if (u >= 1.0) u = 0.0;
  const double s = d.symmetrized() ? -rng.sign() : 1.0;
  return d.quantile_draw(u, s);
}

template <typename Statistic>
EmpiricalLaw run_statistic(std::span<const DistSpec> ds, const McConfig& cfg,
                           Statistic&& stat) {
  std::vector<double> out(cfg.trials);
  parallel_for_trials(cfg.trials, cfg.workers, [&](long t) {
    const bool mirror = cfg.antithetic && (t & 1);
    const std::uint64_t stream_trial = cfg.antithetic ? static_cast<std::uint64_t>(t / 2)
                                                      : static_cast<std::uint64_t>(t);
    double acc = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < ds.size(); ++k) {
      StreamRng rng(cfg.seed, stream_trial, k);
      const double v = mirror ? sample_dist_antithetic(ds[k], rng) : sample_dist(ds[k], rng);
      acc = first ? stat.init(v) : stat.combine(acc, v);
      first = false;
    }
    out[t] = acc;
  }, cfg.batch);
  return EmpiricalLaw::from_samples(std::move(out));
}

struct SumStat {
  double init(double v) const { return v; }
  double combine(double a, double v) const { return a + v; }
};
struct MaxStat {
  double init(double v) const { return v; }
  double combine(double a, double v) const { return a > v ? a : v; }
};

}  // namespace detail

// Empirical law of sum_k f_k, one independent draw of every coordinate per
// trial.
inline EmpiricalLaw sum_law(std::span<const DistSpec> ds, const McConfig& cfg) {
  if (ds.empty()) throw std::invalid_argument("sum_law: empty family");
  return detail::run_statistic(ds, cfg, detail::SumStat{});
}

// Empirical law of max_k f_k; positive laws only.
inline EmpiricalLaw max_law(std::span<const DistSpec> ds, const McConfig& cfg) {
  if (ds.empty()) throw std::invalid_argument("max_law: empty family");
  for (const auto& d : ds)
    if (d.symmetrized())
      throw std::invalid_argument("max_law: maximal statistics require positive laws");
  return detail::run_statistic(ds, cfg, detail::MaxStat{});
}

// One draw of K f: N ~ Poisson(1), then the sum of N independent draws of d
// from the same stream.
inline double kruglov_sample(const DistSpec& d, StreamRng& rng) {
  const int n = rng.poisson1();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += sample_dist(d, rng);
  return acc;
}

inline EmpiricalLaw kruglov_law(const DistSpec& d, const McConfig& cfg) {
  std::vector<double> out(cfg.trials);
  parallel_for_trials(cfg.trials, cfg.workers, [&](long t) {
    StreamRng rng(cfg.seed, static_cast<std::uint64_t>(t), 0);
    out[t] = kruglov_sample(d, rng);
  }, cfg.batch);
  return EmpiricalLaw::from_samples(std::move(out));
}

struct KruglovIdentityReport {
  double ks = 0.0;
  long trials = 0;
  double sum_side_mean = 0.0;
  double disjoint_side_mean = 0.0;
};

// Sampling identity for disjointly-supportable families: the law of
// sum_k h_k with h_k ~ K f_k independent coincides with the law of
// K applied to the disjoint sum.  Reports the two-sample KS distance.
inline KruglovIdentityReport kruglov_disjoint_identity_check(std::span<const DistSpec> ds,
                                                             const McConfig& cfg) {
  double mass = 0.0;
  for (const auto& d : ds) mass += d.support_mass();
  if (mass > 1.0 + 1e-9)
    throw std::invalid_argument("kruglov_disjoint_identity_check: support mass " +
                                std::to_string(mass) + " exceeds 1");

  std::vector<double> sum_side(cfg.trials);
  parallel_for_trials(cfg.trials, cfg.workers, [&](long t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ds.size(); ++k) {
      StreamRng rng(cfg.seed, static_cast<std::uint64_t>(t), k);
      acc += kruglov_sample(ds[k], rng);
    }
    sum_side[t] = acc;
  }, cfg.batch);

  const DistSpec merged = disjoint_sum_as_dist(ds);
  std::vector<double> disjoint_side(cfg.trials);
  parallel_for_trials(cfg.trials, cfg.workers, [&](long t) {
    StreamRng rng(cfg.seed ^ 0x5851F42D4C957F2Dull, static_cast<std::uint64_t>(t), 0);
    disjoint_side[t] = kruglov_sample(merged, rng);
  }, cfg.batch);

  const auto a = EmpiricalLaw::from_samples(std::move(sum_side));
  const auto b = EmpiricalLaw::from_samples(std::move(disjoint_side));
  return {ks_distance(a, b), cfg.trials, a.mean(), b.mean()};
}

}  // namespace phimoment
