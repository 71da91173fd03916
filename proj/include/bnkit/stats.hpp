#pragma once

// Shared scalar statistics: moments, order statistics, and the standard
// normal distribution (delegated to Boost.Math for quantile accuracy).

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "bnkit/common.hpp"

namespace bnkit {

inline double mean(const std::vector<double>& x) {
  if (x.empty()) throw argument_error("mean of empty sample");
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Maximum-likelihood variance (n denominator).
inline double variance_mle(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

// Unbiased sample variance (n-1 denominator).
inline double variance_sample(const std::vector<double>& x) {
  if (x.size() < 2) throw argument_error("sample variance needs n >= 2");
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Median; even-length samples average the two central values.
inline double median(std::vector<double> x) {
  if (x.empty()) throw argument_error("median of empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  if (n % 2 == 1) return x[n / 2];
  return 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

// Most frequent code; frequency ties resolve to the lowest code.
inline int mode_code(const std::vector<int>& codes) {
  if (codes.empty()) throw argument_error("mode of empty sample");
  int best = -1;
  std::size_t best_count = 0;
  std::vector<int> sorted(codes);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > best_count) {
      best_count = j - i;
      best = sorted[i];
    }
    i = j;
  }
  return best;
}

inline double normal_cdf(double z) {
  static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  return boost::math::cdf(std_normal, z);
}

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw argument_error("normal quantile requires p in (0, 1)");
  static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  return boost::math::quantile(std_normal, p);
}

// log density of N(mu, sigma2) at x
inline double normal_logpdf(double x, double mu, double sigma2) {
  static const double log_2pi = std::log(2.0 * 3.14159265358979323846);
  const double d = x - mu;
  return -0.5 * (log_2pi + std::log(sigma2) + d * d / sigma2);
}

}  // namespace bnkit
