#pragma once

// Exact sampling from an upper-truncated normal, N(mean, sd^2) | X <= upper.
// Inverse-CDF for moderate truncation; Robert's exponential rejection once the
// standardized bound drops below -5, where Phi underflows relative precision.

#include <cmath>

#include "spatsel/errors.hpp"
#include "spatsel/rng.hpp"
#include "spatsel/special.hpp"

namespace spatsel {

inline double rtruncnorm(double mean, double sd, double upper, Rng& rng) {
  if (!std::isfinite(mean) || !std::isfinite(sd) || !std::isfinite(upper) || !(sd > 0.0))
    throw numeric_error("rtruncnorm: non-finite input or sd <= 0");
  const double alpha = (upper - mean) / sd;

  if (alpha >= -5.0) {
    const double cap = normal_cdf(alpha);
    const double u = draw_uniform(rng);
    double z = inverse_normal_cdf(u * cap);
    if (z > alpha) z = alpha;  // fp guard at the boundary
    return mean + sd * z;
  }

  // sample Z >= a from the standard normal upper tail, return -Z
  const double a = -alpha;
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (int iter = 0; iter < 100000; ++iter) {
    const double z = a + draw_exponential(rng) / lambda;
    const double dz = z - lambda;
    if (draw_uniform(rng) <= std::exp(-0.5 * dz * dz)) return mean - sd * z;
  }
  return upper;  // unreachable for any sane bound
}

// Analytic moments of the upper-truncated normal (oracles for the sampler).
inline double truncnorm_upper_mean(double mean, double sd, double upper) {
  const double alpha = (upper - mean) / sd;
  return mean - sd * normal_hazard_lower(alpha);
}

inline double truncnorm_upper_var(double mean, double sd, double upper) {
  const double alpha = (upper - mean) / sd;
  const double h = normal_hazard_lower(alpha);
  return sd * sd * (1.0 - alpha * h - h * h);
}

}  // namespace spatsel
