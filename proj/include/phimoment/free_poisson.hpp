#pragma once
// The free Poisson law m_u: density sqrt(4u - (t-1-u)^2) / (2 pi t) on
// ((sqrt(u)-1)^2, (sqrt(u)+1)^2), plus an atom of mass 1-u at zero when
// u < 1.  All free cumulants equal u.
//
// Integrals use the substitution t = 1 + u + 2 sqrt(u) sin(theta), which
// removes the square-root edge singularities; the transformed integrand is
// smooth and adaptive Simpson converges fast.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phimoment/free_cumulants.hpp"

namespace phimoment {

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb, double whole,
                                   double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 16) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace detail

class FreePoissonLaw {
 public:
  explicit FreePoissonLaw(double u) : u_(u) {
    if (!(u > 0)) throw std::invalid_argument("FreePoissonLaw: u must be > 0");
    const double ru = std::sqrt(u);
    lo_ = (ru - 1.0) * (ru - 1.0);
    hi_ = (ru + 1.0) * (ru + 1.0);
  }

  double parameter() const { return u_; }
  double atom() const { return u_ < 1.0 ? 1.0 - u_ : 0.0; }
  std::pair<double, double> support() const { return {lo_, hi_}; }

  double density(double t) const {
    if (t <= lo_ || t >= hi_) return 0.0;
    const double disc = 4.0 * u_ - (t - 1.0 - u_) * (t - 1.0 - u_);
    return disc <= 0.0 ? 0.0 : std::sqrt(disc) / (6.283185307179586 * t);
  }

  // int g dm_u over the continuous part; relative tolerance ~1e-10.
  double integrate(const std::function<double(double)>& g) const {
    const double ru = std::sqrt(u_);
    const double half_pi = 1.5707963267948966;
    const bool unit_rate = std::abs(ru - 1.0) < 1e-12;
    auto integrand = [&](double th) {
      const double s = std::sin(th), c = std::cos(th);
      // 1 + u + 2 sqrt(u) sin = (sqrt(u)+sin)^2 + cos^2, cancellation-free.
      const double t = (ru + s) * (ru + s) + c * c;
      // At u = 1 the weight 4u cos^2/t simplifies to 2(1 - sin), removing
      // the 0/0 at the lower edge.
      const double w = unit_rate ? 2.0 * (1.0 - s) : 4.0 * u_ * c * c / t;
      return g(t) * w;
    };
    // Coarse composite pass fixes the scale for the adaptive tolerance.
    double coarse = 0.0;
    const int panels = 64;
    const double h = 2.0 * half_pi / panels;
    for (int i = 0; i < panels; ++i) {
      const double a = -half_pi + i * h;
      coarse += h / 6.0 * (integrand(a) + 4.0 * integrand(a + 0.5 * h) + integrand(a + h));
    }
    const double tol = 1e-11 * (std::abs(coarse) + 1e-12);
    const double raw = detail::adaptive_simpson(integrand, -half_pi, half_pi, tol);
    return raw / 6.283185307179586;
  }

  // CDF including the atom jump at zero.
  double cdf(double t) const {
    if (t < 0.0) return 0.0;
    if (t <= lo_) return atom();
    if (t >= hi_) return 1.0;
    const double ru = std::sqrt(u_);
    const double half_pi = 1.5707963267948966;
    double x = (t - 1.0 - u_) / (2.0 * ru);
    x = std::min(1.0, std::max(-1.0, x));
    const double th_t = std::asin(x);
    const bool unit_rate = std::abs(ru - 1.0) < 1e-12;
    auto integrand = [&](double th) {
      const double s = std::sin(th), c = std::cos(th);
      if (unit_rate) return 2.0 * (1.0 - s);
      const double tt = (ru + s) * (ru + s) + c * c;
      return 4.0 * u_ * c * c / tt;
    };
    const double mass =
        detail::adaptive_simpson(integrand, -half_pi, th_t, 1e-12) / 6.283185307179586;
    return std::min(1.0, atom() + std::max(0.0, mass));
  }

  // Quantile by bisection on the CDF; the atom maps to 0.
  double quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("FreePoissonLaw: q outside [0,1]");
    if (q <= atom()) return 0.0;
    double lo = lo_, hi = hi_;
    for (int i = 0; i < 80; ++i) {
      const double m = 0.5 * (lo + hi);
      (cdf(m) < q ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
  }

  // Exact moments via the cumulant transform (all free cumulants equal u).
  double moment(int k) const {
    if (k < 1 || k > kMaxMomentOrder) throw std::invalid_argument("FreePoissonLaw: bad order");
    const std::vector<double> kappa(static_cast<std::size_t>(k), u_);
    return cumulants_to_moments(kappa)[k - 1];
  }

  // (int t^p dm_u)^{1/p}; the atom contributes nothing.
  double p_norm(double p) const {
    if (!(p > 0)) throw std::invalid_argument("FreePoissonLaw: p must be > 0");
    const double ip = integrate([p](double t) { return std::pow(t, p); });
    return std::pow(ip, 1.0 / p);
  }

 private:
  double u_, lo_, hi_;
};

inline double free_poisson_density(double u, double t) { return FreePoissonLaw(u).density(t); }

// ||xi_u||_p for u > 1 (the regime of the p-norm equivalence ~ u).
inline double free_poisson_pnorm(double u, double p) {
  if (!(u > 1)) throw std::invalid_argument("free_poisson_pnorm: u must be > 1");
  return FreePoissonLaw(u).p_norm(p);
}

}  // namespace phimoment
