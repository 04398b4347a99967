#pragma once
// Constructive permutation decomposition: given nonnegative vectors with
// y < x (majorization), produce weights a(pi) >= 0 summing to 1 with
// sum_pi a(pi) (x o pi) = y.
//
// Route: a T-transform chain reduces sorted(x) to sorted(y) in <= n-1
// steps; the product of the chain is doubly stochastic and is peeled into
// permutations Birkhoff-style, at most (n-1)^2 + 1 of them.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phimoment {

struct WeightedPermutation {
  double weight = 0.0;
  std::vector<int> perm;  // contribution a * x[perm[i]] to y[i]
};

namespace detail {

using Matrix = std::vector<std::vector<double>>;

inline Matrix identity_matrix(int n) {
  Matrix m(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

// Left-multiplies m by the T-transform acting on rows i, j with weight th:
// row_i <- (1-th) row_i + th row_j, row_j <- th row_i + (1-th) row_j.
inline void apply_t_transform(Matrix& m, int i, int j, double th) {
  const int n = static_cast<int>(m.size());
  for (int c = 0; c < n; ++c) {
    const double a = m[i][c], b = m[j][c];
    m[i][c] = (1.0 - th) * a + th * b;
    m[j][c] = th * a + (1.0 - th) * b;
  }
}

// Perfect matching on the bipartite support graph {(r,c) : m[r][c] > tol},
// by augmenting paths.  Always succeeds for doubly stochastic m.
inline bool support_matching(const Matrix& m, double tol, std::vector<int>& match_col) {
  const int n = static_cast<int>(m.size());
  match_col.assign(n, -1);
  std::vector<int> col_owner(n, -1);
  std::vector<char> seen(n);
  auto augment = [&](auto&& self, int r) -> bool {
    for (int c = 0; c < n; ++c) {
      if (m[r][c] <= tol || seen[c]) continue;
      seen[c] = 1;
      if (col_owner[c] < 0 || self(self, col_owner[c])) {
        col_owner[c] = r;
        match_col[r] = c;
        return true;
      }
    }
    return false;
  };
  for (int r = 0; r < n; ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    if (!augment(augment, r)) return false;
  }
  return true;
}

// Birkhoff peeling of a doubly stochastic matrix.
inline std::vector<WeightedPermutation> birkhoff(Matrix m, double tol = 1e-13) {
  const int n = static_cast<int>(m.size());
  std::vector<WeightedPermutation> out;
  double remaining = 1.0;
  std::vector<int> match;
  while (remaining > tol) {
    if (!support_matching(m, tol * 1e-2, match))
      throw std::runtime_error("birkhoff: no perfect matching in support");
    double th = remaining;
    for (int r = 0; r < n; ++r) th = std::min(th, m[r][match[r]]);
    for (int r = 0; r < n; ++r) m[r][match[r]] -= th;
    out.push_back({th, match});
    remaining -= th;
  }
  if (!out.empty()) {
    double total = 0.0;
    for (const auto& wp : out) total += wp.weight;
    for (auto& wp : out) wp.weight /= total;
  }
  return out;
}

}  // namespace detail

// Checks y < x for the sorted-descending copies; returns the index of the
// first failing partial sum, or -1 if the precondition holds.
inline int majorization_violation(std::span<const double> x, std::span<const double> y,
                                  double tol = 1e-9) {
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());
  double px = 0.0, py = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    px += xs[i];
    py += ys[i];
    const bool last = i + 1 == xs.size();
    if (py > px + tol || (last && std::abs(px - py) > tol)) return static_cast<int>(i);
  }
  return -1;
}

inline std::vector<WeightedPermutation> permutation_decomposition(
    std::span<const double> x, std::span<const double> y, double tol = 1e-9) {
  const int n = static_cast<int>(x.size());
  if (static_cast<int>(y.size()) != n || n == 0)
    throw std::invalid_argument("permutation_decomposition: size mismatch");
  for (double v : x)
    if (v < 0) throw std::invalid_argument("permutation_decomposition: x must be >= 0");
  for (double v : y)
    if (v < 0) throw std::invalid_argument("permutation_decomposition: y must be >= 0");
  if (int k = majorization_violation(x, y, tol); k >= 0)
    throw std::invalid_argument(
        "permutation_decomposition: y is not majorized by x (partial sum " +
        std::to_string(k) + ")");

  // Work on sorted copies; sigma/rho undo the sorting at the end.
  std::vector<int> sigma(n), rho(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::iota(rho.begin(), rho.end(), 0);
  std::sort(sigma.begin(), sigma.end(), [&](int a, int b) { return x[a] > x[b]; });
  std::sort(rho.begin(), rho.end(), [&](int a, int b) { return y[a] > y[b]; });
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) xs[i] = x[sigma[i]];
  for (int i = 0; i < n; ++i) ys[i] = y[rho[i]];

  // T-transform chain: D xs = ys with D doubly stochastic.  The working
  // vector keeps prefix dominance sum_{k<=m}(cur_k - ys_k) >= 0, so the
  // first differing index always sits above its target and a deficit index
  // follows it; each transfer equalizes at least one coordinate.
  detail::Matrix D = detail::identity_matrix(n);
  std::vector<double> cur = xs;
  const double eq_tol = 1e-13 * std::max(1.0, xs.empty() ? 1.0 : xs.front());
  for (int guard = 0; guard < 2 * n; ++guard) {
    int i = -1, j = -1;
    for (int k = 0; k < n; ++k)
      if (cur[k] > ys[k] + eq_tol) { i = k; break; }
    if (i < 0) break;
    for (int k = i + 1; k < n; ++k)
      if (cur[k] < ys[k] - eq_tol) { j = k; break; }
    if (j < 0) break;  // residual is below tolerance
    const double delta = std::min(cur[i] - ys[i], ys[j] - cur[j]);
    const double th = delta / (cur[i] - cur[j]);
    detail::apply_t_transform(D, i, j, th);
    const double a = cur[i], b = cur[j];
    cur[i] = a - delta;
    cur[j] = b + delta;
  }

  auto terms = detail::birkhoff(std::move(D));
  // Conjugate back to the original index order: y[rho[r]] = sum a D[r][c] x[sigma[c]].
  for (auto& t : terms) {
    std::vector<int> p(n);
    for (int r = 0; r < n; ++r) p[rho[r]] = sigma[t.perm[r]];
    t.perm = std::move(p);
  }
  return terms;
}

// Certificate check: reconstructs y from the decomposition of x.
inline double reconstruction_error(std::span<const double> x, std::span<const double> y,
                                   std::span<const WeightedPermutation> terms) {
  std::vector<double> rec(y.size(), 0.0);
  for (const auto& t : terms)
    for (std::size_t i = 0; i < rec.size(); ++i) rec[i] += t.weight * x[t.perm[i]];
  double err = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) err = std::max(err, std::abs(rec[i] - y[i]));
  return err;
}

}  // namespace phimoment
