#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cylkms {

using complex = std::complex<double>;

/// Pairwise (cascade) summation. Error grows like O(log n) in ulps instead of
/// O(n) for left-to-right accumulation, and the reduction tree is fixed, so
/// results are bit-stable regardless of how callers produce the terms.
template <typename T>
T pairwise_sum(std::span<const T> v) {
  const std::size_t n = v.size();
  if (n == 0) return T{};
  if (n <= 8) {
    T acc = v[0];
    for (std::size_t i = 1; i < n; ++i) acc += v[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

/// Pairwise sum of f(i) for i in [lo, hi] without materializing the terms.
template <typename T, typename F>
T pairwise_sum_range(long lo, long hi, F&& f) {
  if (lo > hi) return T{};
  if (hi - lo < 8) {
    T acc = f(lo);
    for (long i = lo + 1; i <= hi; ++i) acc += f(i);
    return acc;
  }
  const long mid = lo + (hi - lo) / 2;
  return pairwise_sum_range<T>(lo, mid, f) + pairwise_sum_range<T>(mid + 1, hi, f);
}

/// Least-squares slope of log|err| against log N. Used to measure observed
/// convergence rates of truncated sums.
double fit_log_slope(std::span<const double> n_values, std::span<const double> errors);

/// Least-squares fit of complex samples y_k to a + b*t_k + c*s_k.
struct AffineFit2 {
  complex a, b, c;
  double max_residual = 0.0;
};
AffineFit2 fit_affine2(std::span<const double> t, std::span<const double> s,
                       std::span<const complex> y);

}  // namespace cylkms
