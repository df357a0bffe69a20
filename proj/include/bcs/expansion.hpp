#pragma once

#include <cmath>
#include <stdexcept>

namespace bcs {

// Binary entropy in nats, h2(0) = h2(1) = 0.
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) {
    if (p == 0.0 || p == 1.0) return 0.0;
    throw std::invalid_argument("binary_entropy: argument outside [0, 1]");
  }
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

namespace detail {

// Defining function of the expansion root for a (nu, s)-biregular ensemble:
//   (nu-1)/nu h2(a) - (1/s) h2(a s/nu) - a (s/nu) h2(nu/s).
// Positive just above 0, negative at a = nu/s, with a single sign change.
inline double expansion_equation(double a, unsigned nu, unsigned s) {
  const double ratio = static_cast<double>(s) / nu;
  return (nu - 1.0) / nu * binary_entropy(a) - binary_entropy(a * ratio) / s -
         a * ratio * binary_entropy(1.0 / ratio);
}

}  // namespace detail

// Positive root a* in (0, nu/s) of the expansion equation, found by bisection
// to absolute tolerance tol. A heuristic for the recoverable-sparsity fraction
// of the ensemble; diagnostic only.
inline double expansion_alpha_star(unsigned nu, unsigned s, double tol = 1e-10) {
  if (nu < 2 || nu >= s)
    throw std::invalid_argument("expansion_alpha_star: requires 2 <= nu < s");
  if (!(tol > 0.0)) throw std::invalid_argument("expansion_alpha_star: tol must be positive");
  double lo = tol;
  double hi = static_cast<double>(nu) / s - tol;
  const double flo = detail::expansion_equation(lo, nu, s);
  const double fhi = detail::expansion_equation(hi, nu, s);
  if (!(flo > 0.0) || !(fhi < 0.0))
    throw std::runtime_error("expansion_alpha_star: no sign change in bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (detail::expansion_equation(mid, nu, s) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Heuristic recoverable sparsity k* = a* M / nu implied by the expansion root.
inline double expansion_k_star(unsigned nu, unsigned s, double num_vars, double tol = 1e-10) {
  return expansion_alpha_star(nu, s, tol) * num_vars / nu;
}

}  // namespace bcs
