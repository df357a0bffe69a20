#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "bcs/ldpc_matrix.hpp"
#include "bcs/rng.hpp"

namespace bcs {

// Recovery target: {0,1} entries. Counts appear when several users pick the
// same codebook column.
using BinarySignal = std::vector<std::uint8_t>;
using CountSignal = std::vector<std::uint32_t>;

struct Measurements {
  std::vector<double> y;
  double sigma = 0.0;  // noise standard deviation
  double alpha = 1.0;  // column amplitude
};

// i.i.d. Bernoulli(rho) signal; deterministic given seed.
inline BinarySignal sample_bernoulli_signal(std::size_t num_vars, double rho,
                                            std::uint64_t seed) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("sample_bernoulli_signal: rho must lie in (0, 1)");
  std::mt19937_64 gen(seed);
  BinarySignal x(num_vars);
  for (auto& b : x) b = uniform01(gen) < rho ? 1 : 0;
  return x;
}

// y = alpha * A x + sigma * z with z i.i.d. standard normal. sigma = 0 gives
// noiseless measurements exactly.
template <class Vec>
Measurements measure(const SparseBinaryMatrix& a, const Vec& x, double sigma, double alpha,
                     std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("measure: sigma must be nonnegative");
  Measurements m;
  m.sigma = sigma;
  m.alpha = alpha;
  a.matvec(x, m.y);
  for (auto& v : m.y) v *= alpha;
  if (sigma > 0.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : m.y) v += sigma * normal(gen);
  }
  return m;
}

// Bit error rate normalized by the expected sparsity k (not by length); the
// per-trial statistic, may exceed 1.
inline double ber(const BinarySignal& x, const BinarySignal& x_hat, double k) {
  if (x.size() != x_hat.size()) throw std::invalid_argument("ber: length mismatch");
  if (!(k > 0.0)) throw std::invalid_argument("ber: k must be positive");
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mismatches += x[i] != x_hat[i];
  return static_cast<double>(mismatches) / k;
}

// Eb/N0 = E_m / (2 sigma^2 J), E_m the transmitted column energy, J the
// number of bits it carries. For the sparse matrices here E_m = alpha^2 nu;
// for the unit-variance dense ensemble E_m = 1.
inline double ebn0_db_to_sigma(double ebn0_db, double e_m, double j_bits) {
  if (!(e_m > 0.0) || !(j_bits > 0.0))
    throw std::invalid_argument("ebn0_db_to_sigma: E_m and J must be positive");
  const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
  return std::sqrt(e_m / (2.0 * j_bits * ebn0));
}

inline double sigma_to_ebn0_db(double sigma, double e_m, double j_bits) {
  if (!(e_m > 0.0) || !(j_bits > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("sigma_to_ebn0_db: arguments must be positive");
  return 10.0 * std::log10(e_m / (2.0 * j_bits * sigma * sigma));
}

}  // namespace bcs
