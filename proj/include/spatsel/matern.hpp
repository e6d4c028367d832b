#pragma once

// Matern correlation with smoothness nu = 1 plus a nugget share:
//   C(d) = r (d/rho) K1(d/rho) + (1 - r) 1{same site},
// the exact-model oracle against which the SPDE/GMRF approximation is checked.

#include <cmath>

#include "spatsel/errors.hpp"
#include "spatsel/special.hpp"

namespace spatsel {

inline double matern_correlation(double d, double rho, double r, bool same_site) {
  if (std::isnan(d) || d < 0.0) throw numeric_error("matern_correlation: distance must be >= 0");
  if (!(rho > 0.0)) throw numeric_error("matern_correlation: rho must be > 0");
  if (d == 0.0) return r + (same_site ? 1.0 - r : 0.0);  // x K1(x) -> 1 as x -> 0
  const double x = d / rho;
  double structured = x * bessel_k1(x);
  if (!(structured > 0.0)) structured = 0.0;  // underflow far beyond the range
  return r * structured;
}

}  // namespace spatsel
