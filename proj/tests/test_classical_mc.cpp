#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "phimoment/classical_mc.hpp"
#include "phimoment/orlicz.hpp"

using namespace phimoment;

TEST_CASE("sample_dist frequencies match binomial confidence intervals") {
  const double a = 2.5, u = 0.37;
  const DistSpec d = DistSpec::scaled_indicator(a, u);
  const long n = 1000000;
  long hits = 0;
  for (long t = 0; t < n; ++t) {
    StreamRng rng(41, t, 0);
    const double v = sample_dist(d, rng);
    REQUIRE((v == 0.0 || v == a));
    if (v == a) ++hits;
  }
  const double sigma = std::sqrt(u * (1 - u) * n);
  REQUIRE(std::abs(hits - u * n) <= 3.0 * sigma);
}

TEST_CASE("degenerate atom always returns its value") {
  const DistSpec d = DistSpec::atoms({{3.25, 1.0}});
  for (long t = 0; t < 1000; ++t) {
    StreamRng rng(42, t, 0);
    REQUIRE(sample_dist(d, rng) == 3.25);
  }
}

TEST_CASE("symmetrized draws have mean zero within three sigma") {
  const DistSpec d = DistSpec::atoms({{1.0, 0.6}, {2.0, 0.2}}, /*symmetrized=*/true);
  const long n = 200000;
  double acc = 0.0, acc2 = 0.0;
  for (long t = 0; t < n; ++t) {
    StreamRng rng(43, t, 0);
    const double v = sample_dist(d, rng);
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / n;
  const double se = std::sqrt(acc2 / n / n);
  REQUIRE(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("sum law of a single part reproduces the part") {
  const DistSpec d = DistSpec::atoms({{2.0, 0.3}, {1.0, 0.2}});
  McConfig cfg;
  cfg.trials = 200000;
  cfg.seed = 44;
  std::vector<DistSpec> ds{d};
  const EmpiricalLaw law = sum_law(ds, cfg);
  // Exact frequencies of the three atoms.
  long c2 = 0, c1 = 0;
  for (double v : law.samples) {
    if (v == 2.0) ++c2;
    if (v == 1.0) ++c1;
  }
  REQUIRE(std::abs(c2 - 0.3 * cfg.trials) <= 3.0 * std::sqrt(0.3 * 0.7 * cfg.trials));
  REQUIRE(std::abs(c1 - 0.2 * cfg.trials) <= 3.0 * std::sqrt(0.2 * 0.8 * cfg.trials));
}

TEST_CASE("two coin atoms convolve exactly") {
  // P(sum = 2) = 1/4 for two independent Atoms[(1, 0.5)].
  std::vector<DistSpec> ds{DistSpec::atoms({{1.0, 0.5}}), DistSpec::atoms({{1.0, 0.5}})};
  McConfig cfg;
  cfg.trials = 1000000;
  cfg.seed = 45;
  const EmpiricalLaw law = sum_law(ds, cfg);
  long twos = 0;
  for (double v : law.samples)
    if (v == 2.0) ++twos;
  REQUIRE(std::abs(twos - 0.25 * cfg.trials) <= 3.0 * std::sqrt(0.25 * 0.75 * cfg.trials));
}

TEST_CASE("n indicators of width 1/n keep unit mean") {
  const int n = 50;
  std::vector<DistSpec> ds(n, DistSpec::scaled_indicator(1.0, 1.0 / n));
  McConfig cfg;
  cfg.trials = 400000;
  cfg.seed = 46;
  const EmpiricalLaw law = sum_law(ds, cfg);
  const double se = std::sqrt(law.variance() / cfg.trials);
  REQUIRE(std::abs(law.mean() - 1.0) <= 3.0 * se);
}

TEST_CASE("max law matches the product CDF and sits below the sum pathwise") {
  const int n = 8;
  const double a = 1.5, u = 0.2;
  std::vector<DistSpec> ds(n, DistSpec::scaled_indicator(a, u));
  McConfig cfg;
  cfg.trials = 400000;
  cfg.seed = 47;
  const EmpiricalLaw mx = max_law(ds, cfg);
  const EmpiricalLaw sm = sum_law(ds, cfg);  // same seed: same draws per trial
  long hits = 0;
  for (double v : mx.samples)
    if (v == a) ++hits;
  const double p = 1.0 - std::pow(1.0 - u, n);
  REQUIRE(std::abs(hits - p * cfg.trials) <= 3.0 * std::sqrt(p * (1 - p) * cfg.trials));
  for (std::size_t i = 0; i < mx.samples.size(); ++i)
    REQUIRE(mx.samples[i] <= sm.samples[i] + 1e-12);  // sorted; max <= sum holds orderwise

  std::vector<DistSpec> sym{DistSpec::atoms({{1.0, 0.5}}, true)};
  REQUIRE_THROWS_AS(max_law(sym, cfg), std::invalid_argument);
}

TEST_CASE("compound Poisson moment identities") {
  // E K f = E f and Var K f = E f^2 at rate one.
  const DistSpec d = DistSpec::atoms({{2.0, 0.25}, {0.5, 0.5}});
  McConfig cfg;
  cfg.trials = 1000000;
  cfg.seed = 48;
  const EmpiricalLaw law = kruglov_law(d, cfg);
  const double ef = d.rearrangement().integral();
  const double ef2 = d.rearrangement().power_integral_from(2.0, 0.0);
  const double se_mean = std::sqrt(law.variance() / cfg.trials);
  REQUIRE(std::abs(law.mean() - ef) <= 4.0 * se_mean);
  // Standard error of the sample variance via the fourth moment.
  double m4 = 0.0;
  const double m = law.mean();
  for (double v : law.samples) m4 += std::pow(v - m, 4);
  m4 /= cfg.trials;
  const double se_var = std::sqrt((m4 - law.variance() * law.variance()) / cfg.trials);
  REQUIRE(std::abs(law.variance() - ef2) <= 4.0 * se_var);
}

TEST_CASE("Kruglov image of the unit constant is Poisson(1)") {
  const DistSpec one = DistSpec::atoms({{1.0, 1.0}});
  McConfig cfg;
  cfg.trials = 1000000;
  cfg.seed = 49;
  const EmpiricalLaw law = kruglov_law(one, cfg);
  std::vector<long> counts(9, 0);
  for (double v : law.samples) {
    const long k = std::lround(v);
    if (k < 9) ++counts[k];
  }
  double p = std::exp(-1.0);
  for (int k = 0; k < 9; ++k) {
    const double sigma = std::sqrt(p * (1 - p) * cfg.trials);
    REQUIRE(std::abs(counts[k] - p * cfg.trials) <= 4.0 * sigma);
    p /= (k + 1);
  }
}

TEST_CASE("Kruglov operator is Phi-moment bounded for power functions") {
  // E Phi(K f) <= e^{B-1} E Phi(f) with B = 2^{p-1} * 2 from the additivity
  // constant of t^p.
  const DistSpec d = DistSpec::atoms({{1.5, 0.3}, {0.75, 0.4}});
  McConfig cfg;
  cfg.trials = 500000;
  cfg.seed = 50;
  const EmpiricalLaw law = kruglov_law(d, cfg);
  for (double p : {1.0, 2.0, 3.0}) {
    const OrliczFn phi = OrliczFn::power(p);
    double lhs = 0.0;
    for (double v : law.samples) lhs += phi(std::abs(v));
    lhs /= cfg.trials;
    const double rhs = phi_moment(phi, d.rearrangement());
    const double bound = std::exp(std::pow(2.0, p - 1.0) * 2.0 - 1.0);
    REQUIRE(lhs <= bound * rhs);
  }
}

TEST_CASE("disjointly supported families satisfy the Kruglov sampling identity") {
  std::vector<DistSpec> ds{DistSpec::scaled_indicator(1.0, 0.3),
                           DistSpec::scaled_indicator(1.0, 0.3)};
  McConfig cfg;
  cfg.trials = 1000000;
  cfg.seed = 51;
  const auto rep = kruglov_disjoint_identity_check(ds, cfg);
  REQUIRE(rep.ks <= 0.01);

  // Both sides are Poisson(0.6) on the integers: closed-form pmf oracle.
  const EmpiricalLaw side = kruglov_law(disjoint_sum_as_dist(ds), cfg);
  double p = std::exp(-0.6);
  for (int k = 0; k < 6; ++k) {
    long c = 0;
    for (double v : side.samples)
      if (std::lround(v) == k) ++c;
    REQUIRE(std::abs(c - p * cfg.trials) <= 4.0 * std::sqrt(p * (1 - p) * cfg.trials));
    p *= 0.6 / (k + 1);
  }

  std::vector<DistSpec> too_big{DistSpec::scaled_indicator(1.0, 0.8),
                                DistSpec::scaled_indicator(1.0, 0.8)};
  REQUIRE_THROWS_AS(kruglov_disjoint_identity_check(too_big, cfg), std::invalid_argument);
}

TEST_CASE("identical seeds reproduce bit-identical laws regardless of workers") {
  std::vector<DistSpec> ds{DistSpec::atoms({{2.0, 0.3}, {1.0, 0.5}}, true),
                           DistSpec::scaled_indicator(1.0, 0.4, true)};
  McConfig cfg;
  cfg.trials = 50000;
  cfg.seed = 52;
  cfg.workers = 1;
  const EmpiricalLaw a = sum_law(ds, cfg);
  cfg.workers = 4;
  const EmpiricalLaw b = sum_law(ds, cfg);
  REQUIRE(a.samples == b.samples);
}

TEST_CASE("empirical rearrangement is equimeasurable with the sample multiset") {
  const DistSpec d = DistSpec::atoms({{2.0, 0.3}, {1.0, 0.4}});
  McConfig cfg;
  cfg.trials = 10000;
  cfg.seed = 53;
  std::vector<DistSpec> ds{d};
  const EmpiricalLaw law = sum_law(ds, cfg);
  const StepFn mu = law.rearrangement();
  long positives = 0;
  for (double v : law.samples)
    if (v > 0) ++positives;
  REQUIRE(mu.support_end() == Catch::Approx(static_cast<double>(positives) / cfg.trials));
  REQUIRE(mu.distribution(1.5) ==
          Catch::Approx(static_cast<double>(std::count(law.samples.begin(), law.samples.end(),
                                                       2.0)) /
                        cfg.trials));
}

TEST_CASE("sample-level Jensen holds for every run") {
  std::vector<DistSpec> ds(5, DistSpec::atoms({{1.2, 0.3}, {0.4, 0.3}}));
  McConfig cfg;
  cfg.trials = 20000;
  cfg.seed = 54;
  const EmpiricalLaw law = sum_law(ds, cfg);
  const OrliczFn phi = OrliczFn::power(3.0);
  double lhs = 0.0;
  for (double v : law.samples) lhs += phi(std::abs(v));
  lhs /= cfg.trials;
  REQUIRE(lhs >= phi(std::abs(law.mean())) - 1e-12);
}

TEST_CASE("support-disjoint sums are Phi-moment dominated by disjoint sums") {
  // Measured constant for E Phi(sum f_k) <= C E Phi(disjoint sum).
  std::vector<DistSpec> ds{DistSpec::scaled_indicator(1.0, 0.25),
                           DistSpec::atoms({{0.8, 0.3}, {0.3, 0.2}})};
  McConfig cfg;
  cfg.trials = 400000;
  cfg.seed = 55;
  const EmpiricalLaw law = sum_law(ds, cfg);
  const StepFn X = disjoint_sum_rearrangement(ds);
  const OrliczFn phi = OrliczFn::power(2.0);
  double lhs = 0.0;
  for (double v : law.samples) lhs += phi(std::abs(v));
  lhs /= cfg.trials;
  const double rhs = phi_moment(phi, X);
  const double measured_C = lhs / rhs;
  INFO("measured C = " << measured_C);
  REQUIRE(std::isfinite(measured_C));
  REQUIRE(measured_C <= std::exp(2.0 * 2.0 - 1.0));  // the Kruglov route bound e^{B-1}
}

TEST_CASE("antithetic pairing keeps the law unbiased") {
  std::vector<DistSpec> ds(4, DistSpec::atoms({{1.0, 0.4}}, true));
  McConfig cfg;
  cfg.trials = 200000;
  cfg.seed = 56;
  cfg.antithetic = true;
  const EmpiricalLaw law = sum_law(ds, cfg);
  const double se = std::sqrt(law.variance() / cfg.trials);
  REQUIRE(std::abs(law.mean()) <= 3.0 * se + 1e-12);
}

TEST_CASE("batch size does not change results") {
  std::vector<DistSpec> ds{DistSpec::atoms({{2.0, 0.3}, {1.0, 0.5}})};
  McConfig a;
  a.trials = 30000;
  a.seed = 57;
  a.workers = 2;
  McConfig b = a;
  b.batch = 7;
  REQUIRE(sum_law(ds, a).samples == sum_law(ds, b).samples);
}
