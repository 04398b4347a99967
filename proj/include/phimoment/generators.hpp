#pragma once
// Deterministic random generators for property checks: random step
// functions, random atomic laws, block averagings (which always produce a
// majorized function), and random doubly stochastic mixtures.

#include <algorithm>
#include <vector>

#include "phimoment/dist_spec.hpp"
#include "phimoment/rng.hpp"
#include "phimoment/step_fn.hpp"

namespace phimoment {

inline StepFn random_step_fn(StreamRng& rng, int max_steps = 8, double value_scale = 4.0,
                             double width_scale = 0.6) {
  const int k = 1 + static_cast<int>(rng.uniform01() * max_steps);
  std::vector<std::pair<double, double>> pieces;
  pieces.reserve(k);
  for (int i = 0; i < k; ++i)
    pieces.emplace_back(0.01 + width_scale * rng.uniform01(),
                        0.05 + value_scale * rng.uniform01());
  return StepFn::from_pieces(std::move(pieces));
}

// Step function supported in (0,1] (a valid inverse CDF).
inline StepFn random_unit_step_fn(StreamRng& rng, int max_steps = 6, double value_scale = 3.0) {
  const int k = 1 + static_cast<int>(rng.uniform01() * max_steps);
  std::vector<double> cuts{0.0};
  for (int i = 0; i < k; ++i) cuts.push_back(rng.uniform01());
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> pieces;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double w = cuts[i] - cuts[i - 1];
    if (w > 1e-6) pieces.emplace_back(w, 0.05 + value_scale * rng.uniform01());
  }
  if (pieces.empty()) pieces.emplace_back(0.5, 1.0);
  return StepFn::from_pieces(std::move(pieces));
}

inline DistSpec random_atoms_dist(StreamRng& rng, int max_atoms = 4, double value_scale = 3.0,
                                  bool symmetrized = false) {
  const int k = 1 + static_cast<int>(rng.uniform01() * max_atoms);
  std::vector<std::pair<double, double>> atoms;
  double mass_left = 0.9;
  for (int i = 0; i < k && mass_left > 1e-3; ++i) {
    const double p = mass_left * (0.2 + 0.6 * rng.uniform01()) / k;
    atoms.emplace_back(0.1 + value_scale * rng.uniform01(), p);
    mass_left -= p;
  }
  return DistSpec::atoms(std::move(atoms), symmetrized);
}

// Averages f over consecutive blocks of its plateaus; the result is always
// majorized by f (equal integral, smaller partial integrals).
inline StepFn block_average(const StepFn& f, StreamRng& rng) {
  const auto& steps = f.steps();
  if (steps.empty()) return f;
  std::vector<std::pair<double, double>> pieces;
  std::size_t i = 0;
  double prev = 0.0;
  while (i < steps.size()) {
    const std::size_t take = 1 + static_cast<std::size_t>(rng.uniform01() * 3);
    const std::size_t j = std::min(steps.size(), i + take);
    const double width = steps[j - 1].t_end - prev;
    double mass = 0.0;
    double p = prev;
    for (std::size_t k = i; k < j; ++k) {
      mass += steps[k].value * (steps[k].t_end - p);
      p = steps[k].t_end;
    }
    pieces.emplace_back(width, mass / width);
    prev = steps[j - 1].t_end;
    i = j;
  }
  return StepFn::from_pieces(std::move(pieces));
}

// y = D x for a random doubly stochastic D (convex mixture of random
// permutations), so y < x by construction.
inline std::vector<double> random_doubly_stochastic_image(std::span<const double> x,
                                                          StreamRng& rng, int n_perms = 4) {
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  std::vector<double> w(n_perms);
  double total = 0.0;
  for (auto& v : w) {
    v = 0.05 + rng.uniform01();
    total += v;
  }
  std::vector<int> perm(n);
  for (int p = 0; p < n_perms; ++p) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
    for (std::size_t i = n; i > 1; --i)
      std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform01() * i)]);
    for (std::size_t i = 0; i < n; ++i) y[i] += (w[p] / total) * x[perm[i]];
  }
  return y;
}

}  // namespace phimoment
