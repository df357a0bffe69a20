#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "bcs/channel.hpp"
#include "bcs/ldpc_matrix.hpp"
#include "bcs/rng.hpp"

namespace bcs {

// Enumerable problem instance: posterior, marginals and bitwise MAP are
// computed exactly over all 2^M states. Verification backbone for the
// sampler; M is capped at 20.
struct TinyInstance {
  const SparseBinaryMatrix* a = nullptr;
  Measurements meas;
  double rho = 0.0;
  double sigma_sq = 1.0;
  double lambda = 0.0;

  void validate() const {
    if (!a) throw std::invalid_argument("TinyInstance: matrix missing");
    if (a->num_vars() > 20) throw std::invalid_argument("TinyInstance: M must be <= 20");
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("TinyInstance: sigma_sq must be positive");
    if (meas.y.size() != a->num_factors())
      throw std::invalid_argument("TinyInstance: y length mismatch");
  }
};

inline double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (const double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

// Precomputes A x for every state mask so repeated posterior evaluations over
// fresh measurements cost O(2^M n) with small constants.
class TinyEnumerator {
 public:
  explicit TinyEnumerator(const SparseBinaryMatrix& a) : a_(&a) {
    if (a.num_vars() > 20) throw std::invalid_argument("TinyEnumerator: M must be <= 20");
    const std::uint32_t m = a.num_vars();
    const std::uint32_t n = a.num_factors();
    const std::size_t states = std::size_t{1} << m;
    ax_.assign(states * n, 0.0);
    for (std::size_t mask = 1; mask < states; ++mask) {
      const auto low = static_cast<std::uint32_t>(std::countr_zero(mask));
      const std::size_t prev = mask & (mask - 1);
      double* row = ax_.data() + mask * n;
      const double* prow = ax_.data() + prev * n;
      for (std::uint32_t f = 0; f < n; ++f) row[f] = prow[f];
      for (std::uint32_t f : a.factors_of(low)) row[f] += 1.0;
    }
  }

  std::size_t num_states() const { return std::size_t{1} << a_->num_vars(); }

  // Unnormalized log posterior weights -||y - alpha A x||^2/(2 sigma_sq) +
  // lambda * popcount(x) for all states.
  void log_weights(const Measurements& meas, double sigma_sq, double lambda,
                   std::vector<double>& out) const {
    const std::uint32_t n = a_->num_factors();
    const double inv = 1.0 / (2.0 * sigma_sq);
    out.resize(num_states());
    for (std::size_t mask = 0; mask < out.size(); ++mask) {
      const double* row = ax_.data() + mask * n;
      double sq = 0.0;
      for (std::uint32_t f = 0; f < n; ++f) {
        const double r = meas.y[f] - meas.alpha * row[f];
        sq += r * r;
      }
      out[mask] = -sq * inv + lambda * static_cast<double>(std::popcount(mask));
    }
  }

  void posterior(const Measurements& meas, double sigma_sq, double lambda,
                 std::vector<double>& out) const {
    log_weights(meas, sigma_sq, lambda, out);
    const double lse = log_sum_exp(out);
    for (auto& w : out) w = std::exp(w - lse);
  }

 private:
  const SparseBinaryMatrix* a_;
  std::vector<double> ax_;
};

// Exact posterior table over {0,1}^M, indexed by bitmask; sums to 1.
inline std::vector<double> exact_posterior(const TinyInstance& inst) {
  inst.validate();
  TinyEnumerator en(*inst.a);
  std::vector<double> p;
  en.posterior(inst.meas, inst.sigma_sq, inst.lambda, p);
  return p;
}

// P(x_i = 1 | y) for every coordinate, from a posterior table.
inline std::vector<double> marginals_from_table(std::span<const double> table,
                                                std::uint32_t num_vars) {
  if (table.size() != (std::size_t{1} << num_vars))
    throw std::invalid_argument("marginals_from_table: table size mismatch");
  std::vector<double> marg(num_vars, 0.0);
  for (std::size_t mask = 0; mask < table.size(); ++mask)
    for (std::uint32_t i = 0; i < num_vars; ++i)
      if (mask >> i & 1) marg[i] += table[mask];
  return marg;
}

inline std::vector<double> exact_marginals(const TinyInstance& inst) {
  return marginals_from_table(exact_posterior(inst), inst.a->num_vars());
}

// Per-coordinate MAP: maximizer of each marginal; exact ties resolve to 0.
inline BinarySignal map_from_marginals(std::span<const double> marg) {
  BinarySignal x(marg.size());
  for (std::size_t i = 0; i < marg.size(); ++i) x[i] = marg[i] > 0.5 ? 1 : 0;
  return x;
}

inline BinarySignal exact_bitwise_map(const TinyInstance& inst) {
  return map_from_marginals(exact_marginals(inst));
}

// Total variation distance (1/2) sum |p - q| between tables on the same support.
inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: support mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

// Draws one state index from a probability table by inverse CDF.
inline std::size_t sample_from_table(std::span<const double> table, std::mt19937_64& gen) {
  const double u = uniform01(gen);
  double acc = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    acc += table[i];
    if (u < acc) return i;
  }
  return table.size() - 1;
}

inline BinarySignal signal_from_mask(std::size_t mask, std::uint32_t num_vars) {
  BinarySignal x(num_vars);
  for (std::uint32_t i = 0; i < num_vars; ++i) x[i] = mask >> i & 1;
  return x;
}

}  // namespace bcs
