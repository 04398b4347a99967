#pragma once
// Orlicz functions: evaluation, a numerical Delta_2 probe, Phi-moments of
// step functions and Luxemburg norms.
//
// Phi-moments are always computed against rearrangements (StepFn), never
// against raw samples, so the integral int_0^inf Phi(mu(t)) dt is an exact
// plateau sum.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phimoment/step_fn.hpp"

namespace phimoment {

class OrliczFn {
 public:
  enum class Kind { Power, PowerLog, ExpMinusOne, Tabulated };

  // Phi(t) = t^p, p > 0.  Convex (an Orlicz function proper) iff p >= 1;
  // p < 1 instances generate the L_p quasi-norms used by the tail checks.
  static OrliczFn power(double p) {
    if (!(p > 0)) throw std::invalid_argument("OrliczFn::power: p must be > 0");
    OrliczFn f(Kind::Power);
    f.param_ = p;
    return f;
  }

  // Phi(t) = t^p log(1+t), p >= 1.
  static OrliczFn power_log(double p) {
    if (!(p >= 1)) throw std::invalid_argument("OrliczFn::power_log: p must be >= 1");
    OrliczFn f(Kind::PowerLog);
    f.param_ = p;
    return f;
  }

  // Phi(t) = e^{s t} - 1, s > 0.  The canonical non-Delta_2 witness.
  static OrliczFn exp_minus_one(double scale) {
    if (!(scale > 0)) throw std::invalid_argument("OrliczFn::exp_minus_one: scale must be > 0");
    OrliczFn f(Kind::ExpMinusOne);
    f.param_ = scale;
    return f;
  }

  // Convex piecewise-linear interpolation through (0,0) and the given
  // (t, Phi(t)) points; extrapolation clamps to the last slope.
  static OrliczFn tabulated(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw std::invalid_argument("OrliczFn::tabulated: no points");
    OrliczFn f(Kind::Tabulated);
    if (points.front().first > 0) points.insert(points.begin(), {0.0, 0.0});
    if (points.size() < 2)
      throw std::invalid_argument("OrliczFn::tabulated: need a point with t > 0");
    double prev_slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const auto [t0, y0] = points[i];
      const auto [t1, y1] = points[i + 1];
      if (!(t1 > t0)) throw std::invalid_argument("OrliczFn::tabulated: abscissae must increase");
      if (y0 < 0 || y1 < 0) throw std::invalid_argument("OrliczFn::tabulated: values must be >= 0");
      const double slope = (y1 - y0) / (t1 - t0);
      if (slope < prev_slope - 1e-12 * std::max(1.0, std::abs(prev_slope)))
        throw std::invalid_argument("OrliczFn::tabulated: interpolation is not convex");
      prev_slope = std::max(prev_slope, slope);
    }
    if (std::abs(points.front().second) > 0)
      throw std::invalid_argument("OrliczFn::tabulated: Phi(0) must be 0");
    f.points_ = std::move(points);
    return f;
  }

  Kind kind() const { return kind_; }
  double param() const { return param_; }

  bool is_convex() const {
    switch (kind_) {
      case Kind::Power: return param_ >= 1.0;
      default: return true;  // PowerLog/ExpMinusOne by construction, Tabulated validated
    }
  }

  // Exact Delta_2 verdict for the analytic kinds; overrides the grid probe.
  std::optional<bool> delta2_exact() const {
    switch (kind_) {
      case Kind::Power: return true;
      case Kind::PowerLog: return true;
      case Kind::ExpMinusOne: return false;
      case Kind::Tabulated: return std::nullopt;
    }
    return std::nullopt;
  }

  double operator()(double t) const {
    if (t < 0) throw std::domain_error("OrliczFn: negative argument (callers pass |t|)");
    switch (kind_) {
      case Kind::Power:
        return std::pow(t, param_);
      case Kind::PowerLog:
        return std::pow(t, param_) * std::log1p(t);
      case Kind::ExpMinusOne: {
        const double x = param_ * t;
        if (x > 709.0) return std::numeric_limits<double>::infinity();
        return std::expm1(x);
      }
      case Kind::Tabulated: {
        if (t <= points_.front().first) return 0.0;
        for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
          const auto [t0, y0] = points_[i];
          const auto [t1, y1] = points_[i + 1];
          if (t <= t1) return y0 + (y1 - y0) * (t - t0) / (t1 - t0);
        }
        const auto [t0, y0] = points_[points_.size() - 2];
        const auto [t1, y1] = points_.back();
        return y1 + (y1 - y0) / (t1 - t0) * (t - t1);
      }
    }
    throw std::logic_error("OrliczFn: unknown kind");
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Power: return "power(" + std::to_string(param_) + ")";
      case Kind::PowerLog: return "power_log(" + std::to_string(param_) + ")";
      case Kind::ExpMinusOne: return "exp_minus_one(" + std::to_string(param_) + ")";
      case Kind::Tabulated: return "tabulated(" + std::to_string(points_.size()) + " pts)";
    }
    return "?";
  }

 private:
  explicit OrliczFn(Kind k) : kind_(k) {}
  Kind kind_;
  double param_ = 0.0;
  std::vector<std::pair<double, double>> points_;
};

inline double eval(const OrliczFn& phi, double t) { return phi(t); }

// 200+ log-spaced points covering [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0 && hi > lo && n >= 2)) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  return g;
}

inline std::vector<double> default_delta2_grid() { return log_grid(1e-4, 1e4, 241); }

struct Delta2Result {
  bool satisfied = false;
  double sup_ratio = 0.0;  // sup over the grid of Phi(2t)/Phi(t), may be inf
};

// Grid probe for the Delta_2 condition Phi(2t) <= C Phi(t).  satisfied
// requires the sup below `cap` and a non-divergent trend: the ratio max over
// the last decade must not exceed twice the max over the middle decade.
inline Delta2Result delta2_probe(const OrliczFn& phi, std::span<const double> t_grid,
                                 double cap = 1e6) {
  if (t_grid.size() < 200)
    throw std::invalid_argument("delta2_probe: grid must have >= 200 points");
  const double lo = t_grid.front(), hi = t_grid.back();
  if (!(lo > 0) || hi / lo < 0.99e8)
    throw std::invalid_argument("delta2_probe: grid must span at least 8 decades");

  const double mid = std::sqrt(lo * hi);
  const double s10 = std::sqrt(10.0);
  double sup = 0.0, mid_max = 0.0, last_max = 0.0;
  bool last_overflow = false;
  for (double t : t_grid) {
    const double denom = phi(t);
    if (denom == 0.0) throw std::domain_error("delta2_probe: Phi vanishes at t = " + std::to_string(t));
    const double numer = phi(2.0 * t);
    const bool in_last = t >= hi / 10.0;
    if (std::isinf(numer)) {
      if (std::isinf(denom)) continue;  // both overflow; earlier points already diverged
      sup = std::numeric_limits<double>::infinity();
      if (in_last) last_overflow = true;
      continue;
    }
    if (std::isinf(denom)) continue;
    const double r = numer / denom;
    sup = std::max(sup, r);
    if (t >= mid / s10 && t <= mid * s10) mid_max = std::max(mid_max, r);
    if (in_last) last_max = std::max(last_max, r);
  }
  const bool trend_ok = !last_overflow && mid_max > 0.0 && last_max <= 2.0 * mid_max;
  return {sup < cap && trend_ok, sup};
}

// tau(Phi(|x|)) = int_0^inf Phi(mu(t,x)) dt, exact for step functions.
inline double phi_moment(const OrliczFn& phi, const StepFn& mu) {
  double acc = 0.0, prev = 0.0;
  for (const auto& st : mu.steps()) {
    acc += phi(st.value) * (st.t_end - prev);
    prev = st.t_end;
  }
  return acc;
}

// Luxemburg norm inf{lambda > 0 : int Phi(mu/lambda) <= 1} by bisection on
// the monotone modular; relative tolerance 1e-10.
inline double luxemburg_norm(const OrliczFn& phi, const StepFn& mu) {
  if (mu.is_zero()) return 0.0;
  const auto modular = [&](double lam) {
    double acc = 0.0, prev = 0.0;
    for (const auto& st : mu.steps()) {
      acc += phi(st.value / lam) * (st.t_end - prev);
      if (std::isinf(acc)) return acc;
      prev = st.t_end;
    }
    return acc;
  };
  double lo = 1e-12, hi = 1e12;
  if (modular(hi) > 1.0) throw std::domain_error("luxemburg_norm: norm exceeds 1e12");
  if (modular(lo) <= 1.0) return lo;
  for (int i = 0; i < 300 && hi - lo > 1e-10 * hi; ++i) {
    const double m = std::sqrt(lo * hi);
    (modular(m) <= 1.0 ? hi : lo) = m;
  }
  return hi;
}

}  // namespace phimoment
