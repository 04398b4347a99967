#pragma once
// Fast invariant suite behind `phimoment selftest`: rearrangement oracles,
// moment-cumulant round trips and Poisson pmf checks, all deterministic.
// Returns 0 on success, 1 on the first failing property (printed by name).
//
// The fault-injection knob corrupts the breakpoints fed to the fixed-point
// property, exercising the failure path itself.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "phimoment/classical_mc.hpp"
#include "phimoment/free_cumulants.hpp"
#include "phimoment/free_poisson.hpp"
#include "phimoment/generators.hpp"
#include "phimoment/orlicz.hpp"

namespace phimoment {

inline int selftest(bool inject_fault = false, std::ostream& log = std::cout) {
  constexpr std::uint64_t kSeed = 0x5e1f7e57;
  bool ok = true;
  auto require = [&](bool cond, const std::string& property) {
    if (!cond) {
      log << "selftest FAILED: " << property << "\n";
      ok = false;
    }
    return cond;
  };

  // Rearrangement fixed point (the fault knob shifts one breakpoint).
  for (int i = 0; i < 200 && ok; ++i) {
    StreamRng rng(kSeed, i, 0);
    StepFn f = random_step_fn(rng);
    StepFn g = rearrangement(f);
    if (inject_fault && i == 57 && !f.is_zero()) g = dilate(g, 1.0 + 1e-6);
    require(approx_equal(f, g, 1e-10), "rearrangement_fixed_point");
  }

  // Disjoint sum adds distribution functions.
  for (int i = 0; i < 200 && ok; ++i) {
    StreamRng rng(kSeed, i, 1);
    const StepFn f = random_step_fn(rng), g = random_step_fn(rng);
    const StepFn both = disjoint_sum({f, g});
    const double s = 4.5 * rng.uniform01();
    require(std::abs(both.distribution(s) - (f.distribution(s) + g.distribution(s))) <= 1e-10,
            "disjoint_sum_distribution_additivity");
  }

  // Head/tail split preserves Phi-moments.
  const OrliczFn phi2 = OrliczFn::power(2.0);
  for (int i = 0; i < 200 && ok; ++i) {
    StreamRng rng(kSeed, i, 2);
    const StepFn x = random_step_fn(rng);
    const auto [head, tail] = head_tail_split(x);
    require(std::abs(phi_moment(phi2, x) - phi_moment(phi2, head) - phi_moment(phi2, tail)) <=
                1e-10 * (1.0 + phi_moment(phi2, x)),
            "head_tail_phi_moment_additivity");
  }

  // Block averaging is majorized and lowers convex moments.
  for (int i = 0; i < 200 && ok; ++i) {
    StreamRng rng(kSeed, i, 3);
    const StepFn f = random_step_fn(rng);
    const StepFn g = block_average(f, rng);
    require(majorizes(f, g, 1e-9), "block_average_majorized");
    require(phi_moment(phi2, g) <= phi_moment(phi2, f) + 1e-9,
            "submajorization_phi_monotonicity");
  }

  // Moment-cumulant round trip at order 12.
  for (int i = 0; i < 100 && ok; ++i) {
    StreamRng rng(kSeed, i, 4);
    std::vector<double> k(12);
    for (auto& v : k) v = 2.0 * rng.uniform01() - 1.0;
    const auto m = cumulants_to_moments(k);
    const auto back = moments_to_cumulants(m);
    double err = 0.0;
    for (int j = 0; j < 12; ++j) err = std::max(err, std::abs(back[j] - k[j]));
    require(err <= 1e-10, "moment_cumulant_round_trip");
  }

  // Free Poisson: normalization and mean via quadrature.
  if (ok) {
    for (double u : {0.25, 1.0, 4.0}) {
      const FreePoissonLaw law(u);
      const double total = law.atom() + law.integrate([](double) { return 1.0; });
      require(std::abs(total - 1.0) <= 1e-8, "free_poisson_normalization");
      require(std::abs(law.integrate([](double t) { return t; }) - u) <= 1e-8 * (1.0 + u),
              "free_poisson_mean");
    }
  }

  // Poisson(1) pmf at 1e5 draws, 5 sigma.
  if (ok) {
    const long trials = 100000;
    std::vector<long> counts(9, 0);
    for (long t = 0; t < trials; ++t) {
      StreamRng rng(kSeed, t, 5);
      const int n = rng.poisson1();
      if (n < 9) ++counts[n];
    }
    double p = std::exp(-1.0);
    for (int n = 0; n < 9 && ok; ++n) {
      const double expect = p * trials;
      const double sigma = std::sqrt(p * (1.0 - p) * trials);
      require(std::abs(counts[n] - expect) <= 5.0 * sigma,
              "poisson1_pmf_n" + std::to_string(n));
      p /= (n + 1);
    }
  }

  // Compound Poisson moment identities at 1e5 draws, 5 sigma.
  if (ok) {
    const DistSpec d = DistSpec::atoms({{2.0, 0.3}, {1.0, 0.4}});
    McConfig cfg;
    cfg.trials = 100000;
    cfg.seed = kSeed + 6;
    const EmpiricalLaw law = kruglov_law(d, cfg);
    const double ef = d.rearrangement().integral();
    const double ef2 = d.rearrangement().power_integral_from(2.0, 0.0);
    const double se_mean = std::sqrt(law.variance() / cfg.trials);
    require(std::abs(law.mean() - ef) <= 5.0 * se_mean, "kruglov_mean_identity");
    // Var K f = E f^2 for compound Poisson at rate 1.
    require(std::abs(law.variance() - ef2) <= 0.05 * ef2, "kruglov_variance_identity");
  }

  // Luxemburg norm closed form for the exponential Orlicz function.
  if (ok) {
    const double lux = luxemburg_norm(OrliczFn::exp_minus_one(1.0), StepFn::constant(1.0, 1.0));
    require(std::abs(lux - 1.0 / std::log(2.0)) <= 1e-8, "luxemburg_exp_closed_form");
  }

  if (ok) log << "selftest passed\n";
  return ok ? 0 : 1;
}

}  // namespace phimoment
