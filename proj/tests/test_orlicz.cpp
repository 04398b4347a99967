#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "phimoment/generators.hpp"
#include "phimoment/orlicz.hpp"

using namespace phimoment;

TEST_CASE("pointwise evaluation") {
  REQUIRE(OrliczFn::power(2.0)(3.0) == Catch::Approx(9.0));
  for (double p : {0.5, 1.0, 2.0, 3.5}) REQUIRE(OrliczFn::power(p)(0.0) == 0.0);
  REQUIRE(OrliczFn::exp_minus_one(1.0)(1.0) == Catch::Approx(std::exp(1.0) - 1.0));
  REQUIRE(OrliczFn::power_log(2.0)(1.0) == Catch::Approx(std::log(2.0)));
  REQUIRE_THROWS_AS(OrliczFn::power(2.0)(-0.5), std::domain_error);
}

TEST_CASE("convexity on random chords") {
  const OrliczFn fns[] = {OrliczFn::power(1.0), OrliczFn::power(2.0), OrliczFn::power(3.0),
                          OrliczFn::power_log(2.0), OrliczFn::exp_minus_one(0.5),
                          OrliczFn::tabulated({{1.0, 0.5}, {2.0, 2.0}, {3.0, 5.0}})};
  for (const auto& phi : fns) {
    REQUIRE(phi.is_convex());
    StreamRng rng(21, 0, 0);
    for (int i = 0; i < 500; ++i) {
      const double s = 5.0 * rng.uniform01();
      const double t = s + 5.0 * rng.uniform01();
      const double th = rng.uniform01();
      const double lhs = phi(th * s + (1.0 - th) * t);
      const double rhs = th * phi(s) + (1.0 - th) * phi(t);
      REQUIRE(lhs <= rhs + 1e-12 * std::max(1.0, rhs));
    }
  }
}

TEST_CASE("delta_2 probe separates power growth from exponential growth") {
  const auto grid = default_delta2_grid();

  const auto cubic = delta2_probe(OrliczFn::power(3.0), grid);
  REQUIRE(cubic.satisfied);
  REQUIRE(cubic.sup_ratio == Catch::Approx(8.0));

  // Oracle for power_log(2): direct grid evaluation of t^2 log(1+t) ratios.
  const OrliczFn pl = OrliczFn::power_log(2.0);
  double oracle_sup = 0.0;
  for (double t : grid) oracle_sup = std::max(oracle_sup, pl(2 * t) / pl(t));
  const auto plog = delta2_probe(pl, grid);
  REQUIRE(plog.satisfied);
  REQUIRE(plog.sup_ratio == Catch::Approx(oracle_sup));
  REQUIRE(plog.sup_ratio <= 8.0);

  // Oracle for e^t - 1: the ratio grows monotonically without bound.
  const OrliczFn em = OrliczFn::exp_minus_one(1.0);
  double last = 0.0;
  bool monotone = true;
  for (double t : grid) {
    const double num = em(2 * t), den = em(t);
    if (std::isinf(num) || std::isinf(den)) break;
    const double r = num / den;
    monotone = monotone && r >= last - 1e-9;
    last = r;
  }
  REQUIRE(monotone);
  const auto expm = delta2_probe(em, grid);
  REQUIRE(!expm.satisfied);
  REQUIRE(expm.sup_ratio > 1e6);

  REQUIRE(OrliczFn::power(3.0).delta2_exact() == true);
  REQUIRE(OrliczFn::exp_minus_one(1.0).delta2_exact() == false);
  REQUIRE(!OrliczFn::tabulated({{1.0, 1.0}}).delta2_exact().has_value());
}

TEST_CASE("delta_2 probe rejects degenerate functions") {
  // Flat-at-zero tabulated function vanishes on the small-t decades.
  const OrliczFn flat = OrliczFn::tabulated({{1.0, 0.0}, {2.0, 1.0}});
  const auto grid = default_delta2_grid();
  REQUIRE_THROWS_AS(delta2_probe(flat, grid), std::domain_error);
  REQUIRE_THROWS_AS(delta2_probe(OrliczFn::power(2.0), log_grid(1e-2, 1e2, 201)),
                    std::invalid_argument);
}

TEST_CASE("phi moments of step functions are exact plateau sums") {
  REQUIRE(phi_moment(OrliczFn::power(2.0), StepFn::constant(2.0, 0.5)) == Catch::Approx(2.0));
  REQUIRE(phi_moment(OrliczFn::exp_minus_one(1.0), StepFn::constant(1.0, 1.0)) ==
          Catch::Approx(std::exp(1.0) - 1.0));
  for (int i = 0; i < 100; ++i) {
    StreamRng rng(22, i, 0);
    const StepFn mu = random_step_fn(rng);
    REQUIRE(phi_moment(OrliczFn::power(1.0), mu) == Catch::Approx(mu.integral()));
  }
}

TEST_CASE("Jensen: phi moment dominates phi of the integral on (0,1]") {
  const OrliczFn fns[] = {OrliczFn::power(2.0), OrliczFn::power(3.0), OrliczFn::power_log(2.0),
                          OrliczFn::exp_minus_one(1.0)};
  for (int i = 0; i < 100; ++i) {
    StreamRng rng(23, i, 0);
    const StepFn mu = random_unit_step_fn(rng);
    for (const auto& phi : fns) {
      const double lhs = phi_moment(phi, mu) + (1.0 - mu.support_end()) * phi(0.0);
      REQUIRE(lhs >= phi(mu.integral()) - 1e-10 * (1.0 + lhs));
    }
  }
}

TEST_CASE("submajorization implies phi-moment monotonicity for convex phi") {
  const OrliczFn fns[] = {OrliczFn::power(1.0), OrliczFn::power(2.5), OrliczFn::power_log(3.0),
                          OrliczFn::exp_minus_one(0.7),
                          OrliczFn::tabulated({{0.5, 0.1}, {1.5, 1.0}, {4.0, 9.0}})};
  for (int i = 0; i < 200; ++i) {
    StreamRng rng(24, i, 0);
    const StepFn f = random_step_fn(rng, 8, 3.0, 0.4);
    const StepFn g = block_average(f, rng);  // g < f by construction
    REQUIRE(majorizes(f, g, 1e-9));
    for (const auto& phi : fns) {
      const double mf = phi_moment(phi, f), mg = phi_moment(phi, g);
      REQUIRE(mg <= mf + 1e-9 * (1.0 + mf));
    }
  }
}

TEST_CASE("Luxemburg norm of power functions is the p-norm") {
  for (double p : {1.0, 2.0, 3.0}) {
    const OrliczFn phi = OrliczFn::power(p);
    for (int i = 0; i < 50; ++i) {
      StreamRng rng(25, i, 0);
      const StepFn mu = random_step_fn(rng);
      const double pnorm = std::pow(mu.power_integral_from(p, 0.0), 1.0 / p);
      REQUIRE(luxemburg_norm(phi, mu) == Catch::Approx(pnorm).epsilon(1e-8));
    }
  }
  REQUIRE(luxemburg_norm(OrliczFn::power(2.0), StepFn::constant(3.7, 1.0)) ==
          Catch::Approx(3.7));
}

TEST_CASE("Luxemburg norm of the exponential function has a closed form") {
  // e^{1/lambda} - 1 = 1  =>  lambda = 1/log 2.
  const double lux = luxemburg_norm(OrliczFn::exp_minus_one(1.0), StepFn::constant(1.0, 1.0));
  REQUIRE(lux == Catch::Approx(1.0 / std::log(2.0)).epsilon(1e-9));
  REQUIRE(luxemburg_norm(OrliczFn::power(2.0), StepFn()) == 0.0);
}

TEST_CASE("unit Luxemburg norm pins the modular at one") {
  const OrliczFn fns[] = {OrliczFn::power(2.0), OrliczFn::power_log(2.0),
                          OrliczFn::exp_minus_one(1.0),
                          OrliczFn::tabulated({{0.5, 0.25}, {2.0, 3.0}, {5.0, 12.0}})};
  for (int i = 0; i < 50; ++i) {
    StreamRng rng(26, i, 0);
    const StepFn mu = random_step_fn(rng, 6, 2.0, 0.5);
    for (const auto& phi : fns) {
      const double lam = luxemburg_norm(phi, mu);
      std::vector<std::pair<double, double>> scaled;
      double prev = 0.0;
      for (const auto& st : mu.steps()) {
        scaled.emplace_back(st.t_end - prev, st.value / lam);
        prev = st.t_end;
      }
      REQUIRE(phi_moment(phi, StepFn::from_pieces(scaled)) == Catch::Approx(1.0).margin(1e-8));
    }
  }
}

TEST_CASE("measured additivity constant stays finite for Delta_2 kinds") {
  // gamma-hat = sup Phi(u+v) / (Phi(u)+Phi(v)) over a grid; for t^p the
  // exact value is 2^{p-1}.
  for (double p : {1.0, 2.0, 3.0}) {
    const OrliczFn phi = OrliczFn::power(p);
    double gamma_hat = 0.0;
    for (double u : log_grid(1e-3, 1e3, 61))
      for (double v : log_grid(1e-3, 1e3, 61))
        gamma_hat = std::max(gamma_hat, phi(u + v) / (phi(u) + phi(v)));
    REQUIRE(std::isfinite(gamma_hat));
    REQUIRE(gamma_hat <= std::pow(2.0, p - 1.0) + 1e-9);
  }
  const OrliczFn pl = OrliczFn::power_log(2.0);
  double gamma_hat = 0.0;
  for (double u : log_grid(1e-3, 1e3, 61))
    for (double v : log_grid(1e-3, 1e3, 61))
      gamma_hat = std::max(gamma_hat, pl(u + v) / (pl(u) + pl(v)));
  REQUIRE(std::isfinite(gamma_hat));
  REQUIRE(gamma_hat <= 4.0);
  INFO("power_log(2) gamma-hat = " << gamma_hat);
}

TEST_CASE("tabulated interpolation clamps extrapolation to the last slope") {
  const OrliczFn tab = OrliczFn::tabulated({{1.0, 1.0}, {2.0, 3.0}});
  REQUIRE(tab(0.5) == Catch::Approx(0.5));
  REQUIRE(tab(1.5) == Catch::Approx(2.0));
  REQUIRE(tab(4.0) == Catch::Approx(3.0 + 2.0 * 2.0));
  REQUIRE_THROWS_AS(OrliczFn::tabulated({{1.0, 5.0}, {2.0, 5.5}}), std::invalid_argument);
}
