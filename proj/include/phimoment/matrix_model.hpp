#pragma once
// Matrix models realizing free independence at finite dimension.
//
// Each law enters as a quantile diagonal (midpoint quantiles of its
// rearrangement, so the empirical spectral distribution matches the law at
// resolution 1/N) and is conjugated by an independent Haar-random
// orthogonal rotation.  Zero quantiles are compressed away: a rank-r part
// costs O(N r^2 + N^2 r) per trial instead of O(N^3).
//
// The free Kruglov map x -> wxw uses a GOE Wigner matrix w normalized to
// the semicircle law on (-2, 2).

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phimoment/dist_spec.hpp"
#include "phimoment/free_cumulants.hpp"
#include "phimoment/free_poisson.hpp"
#include "phimoment/parallel.hpp"
#include "phimoment/rng.hpp"
#include "phimoment/step_fn.hpp"

namespace phimoment {

struct MatrixModelConfig {
  int n_dim = 1024;
  int trials = 32;
  std::uint64_t seed = 1;
  int workers = 0;
};

// Nonzero diagonal entries of one part at matrix dimension n_dim.
struct DiagonalPart {
  std::vector<double> values;
  int n_dim = 0;

  static DiagonalPart from_dist(const DistSpec& d, int n_dim) {
    DiagonalPart part;
    part.n_dim = n_dim;
    const StepFn& mu = d.rearrangement();
    if (d.symmetrized()) {
      // +/- mu interleaved with mass 1/2 each: the signed quantile diagonal.
      if (n_dim % 2 != 0)
        throw std::invalid_argument("DiagonalPart: symmetrized parts need even dimension");
      const int m = n_dim / 2;
      for (int j = 0; j < m; ++j) {
        const double v = mu.value_at((j + 0.5) / m);
        if (v <= 0.0) break;
        part.values.push_back(v);
        part.values.push_back(-v);
      }
    } else {
      for (int i = 0; i < n_dim; ++i) {
        const double v = mu.value_at((i + 0.5) / n_dim);
        if (v <= 0.0) break;
        part.values.push_back(v);
      }
    }
    return part;
  }

  static DiagonalPart from_quantiles(std::vector<double> values, int n_dim) {
    DiagonalPart part;
    part.n_dim = n_dim;
    for (double v : values)
      if (v != 0.0) part.values.push_back(v);
    return part;
  }

  int rank() const { return static_cast<int>(values.size()); }
};

// Midpoint quantile diagonal of a free Poisson law (descending; the atom
// fills the tail with zeros).
inline std::vector<double> free_poisson_quantile_diagonal(const FreePoissonLaw& law, int n) {
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = law.quantile(1.0 - (i + 0.5) / n);
  return d;
}

namespace detail {

// First r columns of a Haar orthogonal matrix: thin QR of a Gaussian block
// with the R-diagonal sign fix.
inline Eigen::MatrixXd haar_stiefel(int n, int r, StreamRng& rng) {
  Eigen::MatrixXd g(n, r);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  for (int j = 0; j < r; ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

inline Eigen::MatrixXd wigner_goe(int n, StreamRng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  return (g + g.transpose()) / std::sqrt(2.0 * n);
}

}  // namespace detail

struct SpectralSample {
  int n_dim = 0;
  int trials = 0;
  std::vector<double> eigenvalues;  // trial-major, ascending within each trial

  std::span<const double> trial(int t) const {
    return {eigenvalues.data() + static_cast<std::size_t>(t) * n_dim,
            static_cast<std::size_t>(n_dim)};
  }

  double min_eigenvalue() const {
    double m = eigenvalues.empty() ? 0.0 : eigenvalues.front();
    for (int t = 0; t < trials; ++t) m = std::min(m, trial(t).front());
    return m;
  }

  std::vector<double> sorted_all() const {
    std::vector<double> v = eigenvalues;
    std::sort(v.begin(), v.end());
    return v;
  }

  // Empirical singular value function on (0,1]; negatives are eigensolver
  // noise for positive models and are clamped (use |.| for symmetric ones).
  StepFn rearrangement(bool absolute = false) const {
    std::vector<std::pair<double, double>> pieces;
    pieces.reserve(eigenvalues.size());
    const double w = 1.0 / static_cast<double>(eigenvalues.size());
    for (double v : eigenvalues)
      pieces.emplace_back(w, absolute ? std::abs(v) : std::max(0.0, v));
    return StepFn::from_pieces(std::move(pieces));
  }

  // Mean and standard error across trials of (1/N) sum_i f(lambda_i).
  template <typename F>
  std::pair<double, double> trace_mean_se(F&& f) const {
    std::vector<double> per(trials);
    for (int t = 0; t < trials; ++t) {
      double acc = 0.0;
      for (double v : trial(t)) acc += f(v);
      per[t] = acc / n_dim;
    }
    double m = 0.0;
    for (double v : per) m += v;
    m /= trials;
    double s2 = 0.0;
    for (double v : per) s2 += (v - m) * (v - m);
    const double se = trials > 1 ? std::sqrt(s2 / (trials - 1.0) / trials) : 0.0;
    return {m, se};
  }
};

namespace detail {

template <typename BuildTrial>
SpectralSample run_spectral_trials(const MatrixModelConfig& cfg, BuildTrial&& build) {
  SpectralSample out;
  out.n_dim = cfg.n_dim;
  out.trials = cfg.trials;
  out.eigenvalues.assign(static_cast<std::size_t>(cfg.n_dim) * cfg.trials, 0.0);
  parallel_for_trials(cfg.trials, cfg.workers, [&](long t) {
    Eigen::MatrixXd a(cfg.n_dim, cfg.n_dim);
    for (int attempt = 0;; ++attempt) {
      build(static_cast<int>(t), attempt, a);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
      if (es.info() == Eigen::Success) {
        Eigen::Map<Eigen::VectorXd>(out.eigenvalues.data() +
                                        static_cast<std::size_t>(t) * cfg.n_dim,
                                    cfg.n_dim) = es.eigenvalues();
        break;
      }
      if (attempt >= 3) throw std::runtime_error("eigensolver failed after 3 retries");
    }
  });
  return out;
}

inline void add_rotated_part(Eigen::MatrixXd& a, const DiagonalPart& part, StreamRng&& rng) {
  const int r = part.rank();
  if (r == 0) return;
  const Eigen::MatrixXd v = haar_stiefel(static_cast<int>(a.rows()), r, rng);
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(part.values.data(), r);
  a.noalias() += (v * d.asDiagonal()) * v.transpose();
}

}  // namespace detail

// Spectrum of sum_k Q_k D_k Q_k^T over independent Haar rotations: the
// matrix surrogate for the sum of freely independent laws.
inline SpectralSample free_sum_spectrum(std::span<const DiagonalPart> parts,
                                        const MatrixModelConfig& cfg) {
  for (const auto& p : parts)
    if (p.n_dim != cfg.n_dim) throw std::invalid_argument("free_sum_spectrum: dimension mismatch");
  return detail::run_spectral_trials(cfg, [&](int t, int attempt, Eigen::MatrixXd& a) {
    a.setZero();
    for (std::size_t k = 0; k < parts.size(); ++k)
      detail::add_rotated_part(a, parts[k],
                               StreamRng(cfg.seed, static_cast<std::uint64_t>(t),
                                         k + static_cast<std::uint64_t>(attempt) * 4096));
  });
}

inline SpectralSample free_sum_spectrum(std::span<const DistSpec> parts,
                                        const MatrixModelConfig& cfg) {
  std::vector<DiagonalPart> dps;
  dps.reserve(parts.size());
  for (const auto& d : parts) {
    if (!std::isfinite(d.bound()))
      throw std::invalid_argument("free_sum_spectrum: parts must be bounded");
    dps.push_back(DiagonalPart::from_dist(d, cfg.n_dim));
  }
  return free_sum_spectrum(std::span<const DiagonalPart>(dps), cfg);
}

// Spectrum of w x w with w a GOE Wigner matrix and x the quantile diagonal
// of d: the free Kruglov image of d.
inline SpectralSample free_kruglov_spectrum(const DistSpec& d, const MatrixModelConfig& cfg) {
  if (d.symmetrized())
    throw std::invalid_argument("free_kruglov_spectrum: positive laws required");
  const DiagonalPart part = DiagonalPart::from_dist(d, cfg.n_dim);
  const int r = part.rank();
  const Eigen::VectorXd dv =
      r > 0 ? Eigen::Map<const Eigen::VectorXd>(part.values.data(), r) : Eigen::VectorXd();
  return detail::run_spectral_trials(cfg, [&](int t, int attempt, Eigen::MatrixXd& a) {
    if (r == 0) {
      a.setZero();
      return;
    }
    StreamRng rng(cfg.seed, static_cast<std::uint64_t>(t),
                  static_cast<std::uint64_t>(attempt) * 4096);
    const Eigen::MatrixXd w = detail::wigner_goe(cfg.n_dim, rng);
    const auto ws = w.leftCols(r);  // x lives on the first r coordinates
    a.noalias() = (ws * dv.asDiagonal()) * ws.transpose();
  });
}

// KS distance of sorted eigenvalues against a free Poisson CDF.  The atom
// sits at zero (eigensolver noise is snapped to it), so ties there compare
// against the CDF's left limit, not the post-jump value.
inline double ks_sorted_vs_cdf(const std::vector<double>& sorted, const FreePoissonLaw& law) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double x = std::abs(sorted[i]) < 1e-9 ? 0.0 : sorted[i];
    std::size_t j = i;
    while (j < sorted.size() && (std::abs(sorted[j]) < 1e-9 ? 0.0 : sorted[j]) == x) ++j;
    const double F_left = x <= 0.0 ? 0.0 : law.cdf(x);  // only jump is at zero
    d = std::max(d, std::abs(law.cdf(x) - static_cast<double>(j) / n));
    d = std::max(d, std::abs(F_left - static_cast<double>(i) / n));
    i = j;
  }
  return d;
}

struct FreeConvolutionReport {
  double ks = 0.0;
  std::array<double, 4> predicted_moments{};
  std::array<double, 4> moment_mean{};
  std::array<double, 4> moment_se{};
};

// Free additive convolution check: spectrum of X1 + Q X2 Q^T against the
// free Poisson law with parameter u1 + u2.
inline FreeConvolutionReport free_convolution_check(double u1, double u2,
                                                    const MatrixModelConfig& cfg) {
  const FreePoissonLaw law1(u1), law2(u2), target(u1 + u2);
  const std::vector<double> d1 = free_poisson_quantile_diagonal(law1, cfg.n_dim);
  const DiagonalPart p2 =
      DiagonalPart::from_quantiles(free_poisson_quantile_diagonal(law2, cfg.n_dim), cfg.n_dim);

  const SpectralSample sample =
      detail::run_spectral_trials(cfg, [&](int t, int attempt, Eigen::MatrixXd& a) {
        a.setZero();
        a.diagonal() = Eigen::Map<const Eigen::VectorXd>(d1.data(), cfg.n_dim);
        detail::add_rotated_part(a, p2,
                                 StreamRng(cfg.seed, static_cast<std::uint64_t>(t),
                                           static_cast<std::uint64_t>(attempt) * 4096));
      });

  FreeConvolutionReport rep;
  const auto sorted = sample.sorted_all();
  rep.ks = ks_sorted_vs_cdf(sorted, target);
  // Cumulant-additivity prediction from the realized quantile diagonals, so
  // the comparison carries only finite-N bias and trial noise (the input
  // discretization would otherwise dwarf the zero-variance first moment).
  auto diagonal_cumulants = [&](const std::vector<double>& diag) {
    std::vector<double> m(4, 0.0);
    for (double v : diag)
      for (int k = 1; k <= 4; ++k) m[k - 1] += std::pow(v, k) / cfg.n_dim;
    return moments_to_cumulants(m);
  };
  const std::vector<double> d2_full = free_poisson_quantile_diagonal(law2, cfg.n_dim);
  const auto k1 = diagonal_cumulants(d1);
  const auto k2 = diagonal_cumulants(d2_full);
  std::vector<double> kappa(4);
  for (int j = 0; j < 4; ++j) kappa[j] = k1[j] + k2[j];
  const auto pred = cumulants_to_moments(kappa);
  for (int k = 1; k <= 4; ++k) {
    rep.predicted_moments[k - 1] = pred[k - 1];
    const auto [m, se] = sample.trace_mean_se([k](double v) { return std::pow(v, k); });
    rep.moment_mean[k - 1] = m;
    rep.moment_se[k - 1] = se;
  }
  return rep;
}

struct FreeMajorizationReport {
  double max_partial_deficit = 0.0;  // max_t (int_0^t mu_y - int_0^t mu_x)
  double l1_difference = 0.0;        // | ||sum y||_1 - ||sum x||_1 |
};

// Free sum majorization: if y_k < x_k coordinate-wise (exact StepFn check),
// the free sums satisfy sum y < sum x.  Both sums share rotations, so the
// comparison is a coupled estimate.
inline FreeMajorizationReport free_majorization_check(std::span<const DistSpec> xs,
                                                      std::span<const DistSpec> ys,
                                                      const MatrixModelConfig& cfg) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("free_majorization_check: family size mismatch");
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (!majorizes(xs[k].rearrangement(), ys[k].rearrangement(), 1e-9))
      throw std::invalid_argument("free_majorization_check: y !< x at part " + std::to_string(k));

  std::vector<DiagonalPart> px, py;
  for (const auto& d : xs) px.push_back(DiagonalPart::from_dist(d, cfg.n_dim));
  for (const auto& d : ys) py.push_back(DiagonalPart::from_dist(d, cfg.n_dim));

  SpectralSample sx, sy;
  sx.n_dim = sy.n_dim = cfg.n_dim;
  sx.trials = sy.trials = cfg.trials;
  sx.eigenvalues.assign(static_cast<std::size_t>(cfg.n_dim) * cfg.trials, 0.0);
  sy.eigenvalues.assign(sx.eigenvalues.size(), 0.0);
  parallel_for_trials(cfg.trials, cfg.workers, [&](long t) {
    Eigen::MatrixXd ax = Eigen::MatrixXd::Zero(cfg.n_dim, cfg.n_dim);
    Eigen::MatrixXd ay = Eigen::MatrixXd::Zero(cfg.n_dim, cfg.n_dim);
    for (std::size_t k = 0; k < px.size(); ++k) {
      const int r = std::max(px[k].rank(), py[k].rank());
      if (r == 0) continue;
      StreamRng rng(cfg.seed, static_cast<std::uint64_t>(t), k);
      const Eigen::MatrixXd v = detail::haar_stiefel(cfg.n_dim, r, rng);
      if (px[k].rank() > 0) {
        const auto vc = v.leftCols(px[k].rank());
        const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(px[k].values.data(), px[k].rank());
        ax.noalias() += (vc * d.asDiagonal()) * vc.transpose();
      }
      if (py[k].rank() > 0) {
        const auto vc = v.leftCols(py[k].rank());
        const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(py[k].values.data(), py[k].rank());
        ay.noalias() += (vc * d.asDiagonal()) * vc.transpose();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(ax, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(ay, Eigen::EigenvaluesOnly);
    if (ex.info() != Eigen::Success || ey.info() != Eigen::Success)
      throw std::runtime_error("free_majorization_check: eigensolver failure");
    Eigen::Map<Eigen::VectorXd>(sx.eigenvalues.data() + static_cast<std::size_t>(t) * cfg.n_dim,
                                cfg.n_dim) = ex.eigenvalues();
    Eigen::Map<Eigen::VectorXd>(sy.eigenvalues.data() + static_cast<std::size_t>(t) * cfg.n_dim,
                                cfg.n_dim) = ey.eigenvalues();
  });

  const StepFn mx = sx.rearrangement();
  const StepFn my = sy.rearrangement();
  FreeMajorizationReport rep;
  for (double t : detail::merged_breakpoints(mx, my))
    rep.max_partial_deficit =
        std::max(rep.max_partial_deficit, my.integral_to(t) - mx.integral_to(t));
  rep.l1_difference = std::abs(mx.integral() - my.integral());
  return rep;
}

}  // namespace phimoment
