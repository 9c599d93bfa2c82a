#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace phs {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kSqrtTwoPi = 2.506628274631000502415765284811;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Inverse standard normal CDF by bisection on erfc; accurate to ~1e-13,
// which is plenty for ball-radius computations.
inline double normal_quantile(double p) {
  if (p <= 0.0) return kNegInf;
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// log(sum(exp(v))) with max subtraction.
inline double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// In-place Cholesky of a symmetric matrix given as row-major lower triangle
// access; returns false if not positive definite (within `jitter` slack on
// the diagonal). `a` is a full dense d*d matrix; on success the lower
// triangle of `a` holds L with A = L L^T.
inline bool cholesky_in_place(std::vector<double>& a, std::size_t d, double jitter = 0.0) {
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j] + jitter;
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (diag <= 0.0) return false;
    double ljj = std::sqrt(diag);
    a[j * d + j] = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = s / ljj;
    }
    for (std::size_t i = 0; i < j; ++i) a[i * d + j] = 0.0;
  }
  return true;
}

}  // namespace phs
