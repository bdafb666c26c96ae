#pragma once

// Independent statistical oracles used by the tests. Everything here is
// deliberately naive and self-contained so it cannot share a bug with the
// library code it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic_two_sample(std::vector<double> a,
                                      std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

inline double exp1_cdf(double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); }

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

// Moment-method estimate of the Rician K factor from |h|^2 samples:
// with V = Var / Mean^2, K = (sqrt(1 - V) + (1 - V)) / V.
inline double estimate_rician_k(const std::vector<double>& power_samples) {
  const double m = mean(power_samples);
  const double v = variance(power_samples) / (m * m);
  const double one_minus_v = 1.0 - v;
  if (one_minus_v <= 0.0) return 0.0;
  return (std::sqrt(one_minus_v) + one_minus_v) / v;
}

}  // namespace testutil
