#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bcs/channel.hpp"
#include "bcs/ldpc_matrix.hpp"

namespace bcs {

struct NnlsConfig {
  std::size_t max_iters = 2000;
  double tol = 1e-8;  // relative objective-decrease stopping threshold
  std::size_t power_iters = 50;

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("NnlsConfig: max_iters must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("NnlsConfig: tol must be positive");
  }
};

struct NnlsResult {
  std::vector<double> x;  // entrywise >= 0
  double objective = 0.0; // 0.5 * ||y - alpha A x||^2
  std::size_t iters = 0;
  bool converged = false;
};

namespace detail {

// Largest eigenvalue of (alpha A)^T (alpha A) by power iteration from the
// all-ones vector, with a 1.1 safety factor.
inline double lipschitz_estimate(const SparseBinaryMatrix& a, double alpha,
                                 std::size_t iters) {
  std::vector<double> v(a.num_vars(), 1.0), av, w;
  double lam = static_cast<double>(a.var_degree());  // fallback: row-sum bound scale
  for (std::size_t it = 0; it < iters; ++it) {
    a.matvec(v, av);
    a.matvec_transpose(av, w);
    double norm = 0.0;
    for (const double c : w) norm += c * c;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) break;
    lam = norm;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / norm;
  }
  return 1.1 * alpha * alpha * lam;
}

}  // namespace detail

// Approximate minimizer of 0.5 ||y - alpha A x||^2 subject to x >= 0 by
// accelerated projected gradient with a monotone restart: whenever the
// accelerated step would increase the objective, fall back to a plain
// projected-gradient step from the last accepted iterate.
inline NnlsResult nnls_solve(const SparseBinaryMatrix& a, std::span<const double> y,
                             const NnlsConfig& cfg = {}, double alpha = 1.0) {
  cfg.validate();
  if (y.size() != a.num_factors()) throw std::invalid_argument("nnls_solve: dimension mismatch");
  for (const double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("nnls_solve: non-finite input");

  const std::size_t m = a.num_vars();
  const double lip = detail::lipschitz_estimate(a, alpha, cfg.power_iters);
  const double step = 1.0 / lip;

  std::vector<double> ax;
  auto objective = [&](const std::vector<double>& x) {
    a.matvec(x, ax);
    double acc = 0.0;
    for (std::size_t f = 0; f < ax.size(); ++f) {
      const double r = y[f] - alpha * ax[f];
      acc += r * r;
    }
    return 0.5 * acc;
  };
  std::vector<double> grad, resid(a.num_factors());
  auto gradient_at = [&](const std::vector<double>& x) {
    // grad = -alpha A^T (y - alpha A x)
    a.matvec(x, ax);
    for (std::size_t f = 0; f < resid.size(); ++f) resid[f] = y[f] - alpha * ax[f];
    a.matvec_transpose(resid, grad);
    for (auto& g : grad) g *= -alpha;
  };
  auto pg_step = [&](const std::vector<double>& from, std::vector<double>& to) {
    gradient_at(from);
    to.resize(m);
    for (std::size_t i = 0; i < m; ++i) to[i] = std::max(0.0, from[i] - step * grad[i]);
  };

  NnlsResult res;
  std::vector<double> x(m, 0.0), z = x, xn;
  double fx = objective(x);
  double t = 1.0;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    pg_step(z, xn);
    double fn = objective(xn);
    if (fn > fx) {  // monotone restart
      z = x;
      t = 1.0;
      pg_step(z, xn);
      fn = objective(xn);
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / tn;
    z.resize(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = xn[i] + momentum * (xn[i] - x[i]);
    x.swap(xn);
    t = tn;
    res.iters = it + 1;
    const bool done = fx - fn <= cfg.tol * std::max(1.0, fx);
    fx = fn;
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  res.objective = fx;
  return res;
}

// Nearest binary value, threshold 1/2; exact ties round to 0.
inline BinarySignal round_binary(std::span<const double> v) {
  BinarySignal x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i] > 0.5 ? 1 : 0;
  return x;
}

}  // namespace bcs
