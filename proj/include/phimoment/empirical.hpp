#pragma once
// Empirical laws: the raw sample multiset of a Monte Carlo run, kept as
// sorted values rather than histograms so downstream Phi-moments use the
// exact empirical rearrangement.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "phimoment/step_fn.hpp"

namespace phimoment {

struct EmpiricalLaw {
  std::vector<double> samples;  // sorted ascending
  long n_trials = 0;

  static EmpiricalLaw from_samples(std::vector<double> raw) {
    EmpiricalLaw law;
    law.n_trials = static_cast<long>(raw.size());
    std::sort(raw.begin(), raw.end());
    law.samples = std::move(raw);
    return law;
  }

  double mean() const {
    double acc = 0.0;
    for (double v : samples) acc += v;
    return samples.empty() ? 0.0 : acc / static_cast<double>(samples.size());
  }

  double variance() const {
    const double m = mean();
    double acc = 0.0;
    for (double v : samples) acc += (v - m) * (v - m);
    return samples.size() < 2 ? 0.0 : acc / static_cast<double>(samples.size() - 1);
  }

  // Decreasing rearrangement of |samples| on (0,1].
  StepFn rearrangement() const {
    std::vector<std::pair<double, double>> pieces;
    pieces.reserve(samples.size());
    const double w = 1.0 / static_cast<double>(n_trials);
    for (double v : samples) pieces.emplace_back(w, std::abs(v));
    return StepFn::from_pieces(std::move(pieces));
  }
};

// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  const auto& x = a.samples;
  const auto& y = b.samples;
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_distance: empty sample");
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

// One-sample KS distance of sorted samples against an analytic CDF.
inline double ks_distance(std::span<const double> sorted_samples,
                          const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted_samples.size());
  if (sorted_samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double F = cdf(sorted_samples[i]);
    d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
  }
  return d;
}

inline double ks_distance(const EmpiricalLaw& a, const std::function<double(double)>& cdf) {
  return ks_distance(std::span<const double>(a.samples), cdf);
}

}  // namespace phimoment
