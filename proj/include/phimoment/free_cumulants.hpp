#pragma once
// Free moment-cumulant transforms.
//
// m_n = sum_{s=1}^{n} kappa_s * sum_{i_1+...+i_s = n-s} m_{i_1}...m_{i_s}
// (boundary-block recursion over non-crossing partitions, conditioning on
// the block of the first element; m_0 = 1).  The inverse solves the same
// triangular system for kappa_n.  Orders are capped at 12; the brute-force
// partition enumeration lives in the test suite as an independent oracle.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phimoment {

inline constexpr int kMaxMomentOrder = 12;

namespace detail {

// A_s(j) = sum over compositions j = i_1+...+i_s, i_l >= 0, of
// m_{i_1}...m_{i_s}, with m given through order j.
inline std::vector<std::vector<double>> composition_sums(std::span<const double> m_with_0,
                                                         int max_s, int max_j) {
  std::vector<std::vector<double>> A(max_s + 1, std::vector<double>(max_j + 1, 0.0));
  for (int j = 0; j <= max_j; ++j) A[1][j] = m_with_0[j];
  for (int s = 2; s <= max_s; ++s)
    for (int j = 0; j <= max_j; ++j)
      for (int i = 0; i <= j; ++i) A[s][j] += m_with_0[i] * A[s - 1][j - i];
  return A;
}

inline void check_order(std::size_t n, const char* who) {
  if (n > kMaxMomentOrder)
    throw std::length_error(std::string(who) + ": order exceeds " +
                            std::to_string(kMaxMomentOrder));
}

}  // namespace detail

// k[j-1] = kappa_j -> m[j-1] = j-th moment.
inline std::vector<double> cumulants_to_moments(std::span<const double> k) {
  detail::check_order(k.size(), "cumulants_to_moments");
  const int M = static_cast<int>(k.size());
  std::vector<double> m0(M + 1, 0.0);
  m0[0] = 1.0;
  for (int n = 1; n <= M; ++n) {
    const auto A = detail::composition_sums(m0, n, n - 1);
    double acc = 0.0;
    for (int s = 1; s <= n; ++s) acc += k[s - 1] * A[s][n - s];
    m0[n] = acc;
  }
  return {m0.begin() + 1, m0.end()};
}

// m[j-1] = j-th moment -> k[j-1] = kappa_j.
inline std::vector<double> moments_to_cumulants(std::span<const double> m) {
  detail::check_order(m.size(), "moments_to_cumulants");
  const int M = static_cast<int>(m.size());
  std::vector<double> m0(M + 1, 0.0);
  m0[0] = 1.0;
  for (int i = 0; i < M; ++i) m0[i + 1] = m[i];
  std::vector<double> k(M, 0.0);
  for (int n = 1; n <= M; ++n) {
    const auto A = detail::composition_sums(m0, n, n - 1);
    double acc = m0[n];
    for (int s = 1; s < n; ++s) acc -= k[s - 1] * A[s][n - s];
    k[n - 1] = acc;  // the s = n term is kappa_n * m_0^n
  }
  return k;
}

// Positive semidefiniteness of the Hankel matrix [m_{i+j}]_{i,j=0..r} by
// pivoted Cholesky; genuine probability laws pass within tolerance.
inline bool moment_hankel_psd(std::span<const double> m, double tol = 1e-8) {
  const int r = static_cast<int>(m.size()) / 2;
  std::vector<std::vector<double>> H(r + 1, std::vector<double>(r + 1));
  auto moment = [&](int j) { return j == 0 ? 1.0 : m[j - 1]; };
  for (int i = 0; i <= r; ++i)
    for (int j = 0; j <= r; ++j) H[i][j] = moment(i + j);
  double scale = 1.0;
  for (int i = 0; i <= r; ++i) scale = std::max(scale, H[i][i]);
  for (int p = 0; p <= r; ++p) {
    if (H[p][p] < -tol * scale) return false;
    if (H[p][p] <= tol * scale) continue;  // treat as zero pivot
    for (int i = p + 1; i <= r; ++i) {
      const double f = H[i][p] / H[p][p];
      for (int j = p; j <= r; ++j) H[i][j] -= f * H[p][j];
    }
  }
  return true;
}

}  // namespace phimoment
