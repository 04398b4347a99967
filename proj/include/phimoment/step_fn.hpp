#pragma once
// Nonincreasing right-continuous step functions on (0, inf).
//
// Every decreasing rearrangement handled by this library is a StepFn: a
// finite list of plateaus (t_{i-1}, t_i] -> v_i with v_1 >= v_2 >= ... > 0
// and zero beyond the last breakpoint.  All integrals against such
// functions are exact sums, so the whole rearrangement calculus below
// (distribution functions, disjoint sums, dilations, submajorization,
// head/tail splits, composite norms) carries no quadrature error.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace phimoment {

// Breakpoint merge tolerance (relative).
inline constexpr double kMergeTol = 1e-12;

inline bool nearly_equal(double a, double b, double tol = kMergeTol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Step {
  double t_end = 0.0;  // right endpoint of the plateau (t_prev, t_end]
  double value = 0.0;  // plateau value, > 0 in canonical form
};

class StepFn {
 public:
  StepFn() = default;

  // Builds the canonical form from explicit breakpoints; values must be
  // nonincreasing and endpoints strictly increasing.
  static StepFn from_breaks(std::vector<Step> breaks) {
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      if (!(breaks[i].t_end > 0) || !std::isfinite(breaks[i].t_end))
        throw std::invalid_argument("StepFn: breakpoints must be positive and finite");
      if (breaks[i].value < 0 || !std::isfinite(breaks[i].value))
        throw std::invalid_argument("StepFn: values must be nonnegative and finite");
      if (i > 0) {
        if (breaks[i].t_end <= breaks[i - 1].t_end)
          throw std::invalid_argument("StepFn: breakpoints must be strictly increasing");
        if (breaks[i].value > breaks[i - 1].value + kMergeTol * std::max(1.0, breaks[i - 1].value))
          throw std::invalid_argument("StepFn: values must be nonincreasing");
      }
    }
    StepFn f;
    f.steps_ = std::move(breaks);
    f.canonicalize();
    return f;
  }

  // Builds the rearrangement of an arbitrary multiset of (width, value)
  // pieces: sort by value descending, lay the pieces end to end.
  static StepFn from_pieces(std::vector<std::pair<double, double>> width_value) {
    for (auto& [w, v] : width_value) {
      if (w < 0 || !std::isfinite(w)) throw std::invalid_argument("StepFn: widths must be >= 0");
      if (v < 0 || !std::isfinite(v)) throw std::invalid_argument("StepFn: values must be >= 0");
    }
    std::sort(width_value.begin(), width_value.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<Step> breaks;
    double t = 0.0;
    for (const auto& [w, v] : width_value) {
      if (w <= 0.0 || v <= 0.0) continue;
      t += w;
      breaks.push_back({t, v});
    }
    StepFn f;
    f.steps_ = std::move(breaks);
    f.canonicalize();
    return f;
  }

  static StepFn constant(double value, double width) {
    return from_pieces({{width, value}});
  }

  const std::vector<Step>& steps() const { return steps_; }
  bool is_zero() const { return steps_.empty(); }

  double support_end() const { return steps_.empty() ? 0.0 : steps_.back().t_end; }

  // sup = mu(0+), the essential supremum.
  double sup() const { return steps_.empty() ? 0.0 : steps_.front().value; }

  // mu(t) with the convention value v_i on (t_{i-1}, t_i]; zero beyond support.
  double value_at(double t) const {
    if (!(t > 0)) throw std::domain_error("StepFn::value_at: t must be > 0");
    auto it = std::lower_bound(steps_.begin(), steps_.end(), t,
                               [](const Step& s, double x) { return s.t_end < x; });
    return it == steps_.end() ? 0.0 : it->value;
  }

  // Distribution function lambda(s) = Leb{mu > s}; right-continuous in s.
  double distribution(double s) const {
    double lam = 0.0;
    for (const auto& st : steps_)
      if (st.value > s) lam = st.t_end;
    return lam;
  }

  double integral() const {
    double acc = 0.0, prev = 0.0;
    for (const auto& st : steps_) {
      acc += st.value * (st.t_end - prev);
      prev = st.t_end;
    }
    return acc;
  }

  // int_0^t mu
  double integral_to(double t) const {
    if (t <= 0) return 0.0;
    double acc = 0.0, prev = 0.0;
    for (const auto& st : steps_) {
      if (t <= st.t_end) {
        acc += st.value * (t - prev);
        return acc;
      }
      acc += st.value * (st.t_end - prev);
      prev = st.t_end;
    }
    return acc;
  }

  // int_from^inf mu^p  (exact plateau sum)
  double power_integral_from(double p, double from) const {
    double acc = 0.0, prev = 0.0;
    for (const auto& st : steps_) {
      const double lo = std::max(prev, from);
      if (st.t_end > lo) acc += std::pow(st.value, p) * (st.t_end - lo);
      prev = st.t_end;
    }
    return acc;
  }

  std::vector<std::pair<double, double>> to_pairs() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(steps_.size());
    for (const auto& st : steps_) out.emplace_back(st.t_end, st.value);
    return out;
  }

  friend bool approx_equal(const StepFn& a, const StepFn& b, double tol) {
    if (a.steps_.size() != b.steps_.size()) return false;
    for (std::size_t i = 0; i < a.steps_.size(); ++i) {
      if (!nearly_equal(a.steps_[i].t_end, b.steps_[i].t_end, tol)) return false;
      if (!nearly_equal(a.steps_[i].value, b.steps_[i].value, tol)) return false;
    }
    return true;
  }

 private:
  void canonicalize() {
    std::vector<Step> out;
    out.reserve(steps_.size());
    for (const auto& st : steps_) {
      if (st.value <= 0.0) break;  // values are nonincreasing; the rest is the zero tail
      if (!out.empty() && nearly_equal(out.back().value, st.value)) {
        out.back().t_end = st.t_end;
      } else {
        out.push_back(st);
      }
    }
    steps_ = std::move(out);
  }

  std::vector<Step> steps_;
};

// Rearrangement of a StepFn is the identity (equimeasurability fixed point).
inline StepFn rearrangement(const StepFn& f) {
  std::vector<std::pair<double, double>> pieces;
  double prev = 0.0;
  for (const auto& st : f.steps()) {
    pieces.emplace_back(st.t_end - prev, st.value);
    prev = st.t_end;
  }
  return StepFn::from_pieces(std::move(pieces));
}

inline double distribution_fn(const StepFn& mu, double s) { return mu.distribution(s); }

// Rearrangement of the disjoint sum: distribution functions add, which for
// step functions is a sort of all plateaus by value.
inline StepFn disjoint_sum(std::span<const StepFn> mus) {
  std::vector<std::pair<double, double>> pieces;
  for (const auto& mu : mus) {
    double prev = 0.0;
    for (const auto& st : mu.steps()) {
      pieces.emplace_back(st.t_end - prev, st.value);
      prev = st.t_end;
    }
  }
  return StepFn::from_pieces(std::move(pieces));
}

inline StepFn disjoint_sum(std::initializer_list<StepFn> mus) {
  return disjoint_sum(std::span<const StepFn>(mus.begin(), mus.size()));
}

// Dilation sigma_s: (sigma_s mu)(t) = mu(t/s).
inline StepFn dilate(const StepFn& mu, double s) {
  if (!(s > 0) || !std::isfinite(s)) throw std::invalid_argument("dilate: s must be > 0");
  std::vector<Step> breaks;
  breaks.reserve(mu.steps().size());
  for (const auto& st : mu.steps()) breaks.push_back({st.t_end * s, st.value});
  return StepFn::from_breaks(std::move(breaks));
}

namespace detail {
inline std::vector<double> merged_breakpoints(const StepFn& a, const StepFn& b) {
  std::vector<double> ts;
  for (const auto& st : a.steps()) ts.push_back(st.t_end);
  for (const auto& st : b.steps()) ts.push_back(st.t_end);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}
}  // namespace detail

// g is submajorized by f (g <<< f): int_0^t g <= int_0^t f + tol for all t.
// Both partial integrals are piecewise linear, so checking the merged
// breakpoint set is exact.
inline bool submajorizes(const StepFn& f, const StepFn& g, double tol = 1e-12) {
  for (double t : detail::merged_breakpoints(f, g))
    if (g.integral_to(t) > f.integral_to(t) + tol) return false;
  return true;
}

// g < f: submajorization plus equal integrals.
inline bool majorizes(const StepFn& f, const StepFn& g, double tol = 1e-12) {
  return submajorizes(f, g, tol) && std::abs(f.integral() - g.integral()) <= tol;
}

enum class CompositeNorm { L1, L2, L1CapLinf, L2CapLinf, L1PlusL2Holmstedt };

// The five composite norms used by the verification suites.  L1+L2 is the
// Holmstedt two-term expression at t=1: int_0^1 mu + (int_1^inf mu^2)^{1/2}.
inline double composite_norm(const StepFn& mu, CompositeNorm which) {
  switch (which) {
    case CompositeNorm::L1:
      return mu.integral();
    case CompositeNorm::L2:
      return std::sqrt(mu.power_integral_from(2.0, 0.0));
    case CompositeNorm::L1CapLinf:
      return std::max(mu.integral(), mu.sup());
    case CompositeNorm::L2CapLinf:
      return std::max(std::sqrt(mu.power_integral_from(2.0, 0.0)), mu.sup());
    case CompositeNorm::L1PlusL2Holmstedt:
      return mu.integral_to(1.0) + std::sqrt(mu.power_integral_from(2.0, 1.0));
  }
  throw std::logic_error("composite_norm: unknown norm");
}

// Splits X into head = mu(X) restricted to (0,1] and tail = mu(X) on (1,inf)
// shifted to the origin.  head (+) tail is equimeasurable with X.
inline std::pair<StepFn, StepFn> head_tail_split(const StepFn& X) {
  std::vector<Step> head, tail;
  for (const auto& st : X.steps()) {
    if (st.t_end <= 1.0) {
      head.push_back(st);
    } else {
      if (head.empty() || head.back().t_end < 1.0) head.push_back({1.0, st.value});
      tail.push_back({st.t_end - 1.0, st.value});
    }
  }
  return {StepFn::from_breaks(std::move(head)), StepFn::from_breaks(std::move(tail))};
}

}  // namespace phimoment
