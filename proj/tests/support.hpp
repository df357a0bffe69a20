#pragma once

// Shared tiny-instance fixtures for the oracle-backed tests.

#include <cmath>
#include <memory>
#include <vector>

#include "bcs/channel.hpp"
#include "bcs/exact_oracle.hpp"
#include "bcs/glauber.hpp"
#include "bcs/ldpc_matrix.hpp"
#include "bcs/rng.hpp"

namespace bcs::testsupport {

// Canonical enumerable family: M=8, n=4, nu=2, s=4.
inline SparseBinaryMatrix tiny_matrix(std::uint64_t seed) {
  return SparseBinaryMatrix::sample_gallager({8, 4, 2, 4}, seed);
}

struct TinyProblem {
  std::unique_ptr<SparseBinaryMatrix> a;
  BinarySignal x;
  Measurements meas;
  double rho = 0.0;
  double sigma_sq = 1.0;
  double lambda = 0.0;

  TinyInstance instance() const { return {a.get(), meas, rho, sigma_sq, lambda}; }
};

inline TinyProblem make_tiny(std::uint64_t matrix_seed, double rho, double sigma,
                             std::uint64_t draw_seed) {
  TinyProblem p;
  p.a = std::make_unique<SparseBinaryMatrix>(tiny_matrix(matrix_seed));
  p.rho = rho;
  p.sigma_sq = sigma * sigma;
  p.lambda = prior_log_odds(rho);
  p.x = sample_bernoulli_signal(8, rho, derive_seed(draw_seed, {1}));
  p.meas = measure(*p.a, p.x, sigma, 1.0, derive_seed(draw_seed, {2}));
  return p;
}

// Direct-summation posterior in extended precision; an independent
// normalization path used to cross-check the log-sum-exp route.
inline std::vector<double> posterior_direct(const TinyInstance& inst) {
  const std::size_t states = std::size_t{1} << inst.a->num_vars();
  std::vector<long double> w(states);
  long double total = 0.0L;
  for (std::size_t mask = 0; mask < states; ++mask) {
    const BinarySignal x = signal_from_mask(mask, inst.a->num_vars());
    const auto ax = inst.a->matvec(x);
    long double sq = 0.0L;
    for (std::size_t f = 0; f < ax.size(); ++f) {
      const long double r = static_cast<long double>(inst.meas.y[f]) -
                            static_cast<long double>(inst.meas.alpha) * ax[f];
      sq += r * r;
    }
    int ones = 0;
    for (const auto b : x) ones += b;
    w[mask] = std::exp(-sq / (2.0L * inst.sigma_sq) +
                       static_cast<long double>(inst.lambda) * ones);
    total += w[mask];
  }
  std::vector<double> p(states);
  for (std::size_t mask = 0; mask < states; ++mask)
    p[mask] = static_cast<double>(w[mask] / total);
  return p;
}

}  // namespace bcs::testsupport
