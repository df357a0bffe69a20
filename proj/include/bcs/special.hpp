#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcs {

// Numerically stable logistic function 1/(1+e^-x); never overflows.
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace detail {

// Rational approximation of the standard normal quantile (Acklam), relative
// error below 1.2e-9 on (0,1). Used only as the initial guess for erf_inv.
inline double normal_quantile_approx(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// Inverse error function: rational initial guess plus one Newton refinement
// against std::erf. Absolute error well below 1e-10 away from the endpoints.
inline double erf_inv(double p) {
  if (std::isnan(p) || p < -1.0 || p > 1.0)
    throw std::invalid_argument("erf_inv: argument must lie in [-1, 1]");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (p == -1.0) return -std::numeric_limits<double>::infinity();
  if (p == 0.0) return 0.0;
  double x = detail::normal_quantile_approx(0.5 * (p + 1.0)) / std::sqrt(2.0);
  const double sqrt_pi_over_2 = 0.8862269254527580;  // sqrt(pi)/2
  x -= (std::erf(x) - p) * sqrt_pi_over_2 * std::exp(x * x);
  return x;
}

// Standard normal quantile Phi^{-1}(p) = sqrt(2) * erfinv(2p - 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: argument must lie in (0, 1)");
  return std::sqrt(2.0) * erf_inv(2.0 * p - 1.0);
}

// Inverse of the Gaussian tail function, Q^{-1}(eps) = sqrt(2) * erfinv(1 - 2 eps).
inline double q_inv(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("q_inv: argument must lie in (0, 1)");
  return std::sqrt(2.0) * erf_inv(1.0 - 2.0 * eps);
}

}  // namespace bcs
