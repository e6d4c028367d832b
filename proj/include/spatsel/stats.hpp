#pragma once

// Small sample-statistics helpers shared by selection, censoring and reports.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "spatsel/errors.hpp"

namespace spatsel {

// Type-7 empirical quantile (linear interpolation of order statistics).
inline double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw data_error("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw data_error("quantile: q outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - std::floor(h)) * (values[lo + 1] - values[lo]);
}

inline double quantile_type7(const Eigen::Ref<const Eigen::VectorXd>& v, double q) {
  return quantile_type7(std::vector<double>(v.data(), v.data() + v.size()), q);
}

inline double sample_mean(const Eigen::Ref<const Eigen::VectorXd>& v) { return v.mean(); }

inline double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() < 2) return 0.0;
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / (static_cast<double>(v.size()) - 1.0));
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw data_error("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

// Large-sample critical value c(alpha) * sqrt((n+m)/(n m)).
inline double ks_critical(double c_alpha, size_t n, size_t m) {
  return c_alpha * std::sqrt((static_cast<double>(n) + m) / (static_cast<double>(n) * m));
}

}  // namespace spatsel
