#pragma once

// Scalar special functions used across the library: modified Bessel K1,
// standard normal pdf/cdf/quantile and their log/tail-safe variants.

#include <cmath>
#include <limits>

#include "spatsel/errors.hpp"

namespace spatsel {

namespace detail {

// K1 by the ascending series, accurate for 0 < x <= 2:
//   K1(x) = 1/x + log(x/2) I1(x) - (x/4) sum_k [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
// with q = x^2/4 and I1(x) = (x/2) sum_k q^k/(k!(k+1)!).
inline double bessel_k1_series(double x) {
  constexpr double euler_gamma = 0.57721566490153286060651209;
  const double q = 0.25 * x * x;
  double term = 1.0;              // q^k / (k!(k+1)!)
  double psi_a = -euler_gamma;    // psi(k+1)
  double psi_b = 1.0 - euler_gamma;  // psi(k+2)
  double sum_i = 0.0, sum_psi = 0.0;
  for (int k = 0; k < 64; ++k) {
    sum_i += term;
    sum_psi += (psi_a + psi_b) * term;
    const double next = term * q / ((k + 1.0) * (k + 2.0));
    psi_a = psi_b;
    psi_b += 1.0 / (k + 2.0);
    if (next < 1e-18 * (std::abs(sum_i) + 1.0)) {
      term = next;
      break;
    }
    term = next;
  }
  const double i1 = 0.5 * x * sum_i;
  return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * sum_psi;
}

// Temme-style continued fraction (CF2) at order mu = 0, for x >= 2.
// Yields K0 and K1 together; we return K1.
inline double bessel_k1_cf(double x) {
  constexpr double eps = 1e-16;
  const double a1 = 0.25;  // 1/4 - mu^2 with mu = 0
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i <= 1000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) / s;
  return k0 * (x + 0.5 - h) / x;
}

}  // namespace detail

// Modified Bessel function of the second kind, order 1.
inline double bessel_k1(double x) {
  if (std::isnan(x) || x < 0.0) throw numeric_error("bessel_k1: argument must be >= 0");
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return x <= 2.0 ? detail::bessel_k1_series(x) : detail::bessel_k1_cf(x);
}

inline double normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// log Phi(x); switches to the Mills-ratio expansion once erfc underflows.
inline double log_normal_cdf(double x) {
  if (x > -35.0) {
    const double c = normal_cdf(x);
    if (c > 0.0) return std::log(c);
  }
  const double x2 = x * x;
  const double mills = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - 0.5 * std::log(2.0 * M_PI) - std::log(-x) + std::log(mills);
}

// phi(x)/Phi(x), stable in the far left tail.
inline double normal_hazard_lower(double x) {
  if (x < -30.0) {
    const double x2 = x * x;
    return -x / (1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2));
  }
  return normal_pdf(x) / normal_cdf(x);
}

// Inverse standard normal CDF (Wichura's PPND16 rational approximations).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw numeric_error("inverse_normal_cdf: p outside [0,1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) *
                 r +
             4.5921953931549871457e+4) *
                r +
            1.3731693765509461125e+4) *
               r +
           1.9715909503065514427e+3) *
              r +
          1.3314166789178437745e+2) *
             r +
         3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) *
                 r +
             2.1213794301586595867e+4) *
                r +
            5.3941960214247511077e+3) *
               r +
           6.8718700749205790830e+2) *
              r +
          4.2313330701600911252e+1) *
             r +
         1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e+0) *
                r +
            3.64784832476320460504e+0) *
               r +
           5.76949722146069140550e+0) *
              r +
          4.63033784615654529590e+0) *
             r +
         1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e+0) *
              r +
          2.05319162663775882187e+0) *
             r +
         1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e+0) *
              r +
          5.46378491116411436990e+0) *
             r +
         6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

}  // namespace spatsel
