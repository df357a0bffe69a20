#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "bcs/channel.hpp"
#include "bcs/ldpc_matrix.hpp"
#include "bcs/rng.hpp"
#include "bcs/special.hpp"

namespace bcs {

// Prior log-odds lambda = log(rho / (1 - rho)).
inline double prior_log_odds(double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("prior_log_odds: rho must lie in (0, 1)");
  return std::log(rho / (1.0 - rho));
}

struct AnnealSchedule {
  // Effective noise variance starts here and interpolates geometrically down
  // to the target sigma_sq over the first half of the run, constant after.
  double sigma_sq_start = 0.0;
};

struct GlauberConfig {
  std::uint64_t steps = 0;  // T
  double sigma_sq = 1.0;
  double lambda = 0.0;
  std::optional<AnnealSchedule> anneal;
  std::uint64_t seed = 0;
  bool record_trajectory = false;
  std::uint64_t trajectory_stride = 1;

  void validate() const {
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("GlauberConfig: sigma_sq must be positive");
    if (trajectory_stride == 0)
      throw std::invalid_argument("GlauberConfig: trajectory_stride must be positive");
    if (anneal && !(anneal->sigma_sq_start >= sigma_sq))
      throw std::invalid_argument("GlauberConfig: anneal must start at sigma_sq_start >= sigma_sq");
  }
};

inline double effective_sigma_sq(const GlauberConfig& cfg, std::uint64_t t) {
  if (!cfg.anneal) return cfg.sigma_sq;
  const double half = 0.5 * static_cast<double>(cfg.steps);
  if (half <= 0.0 || static_cast<double>(t) >= half) return cfg.sigma_sq;
  const double frac = static_cast<double>(t) / half;
  return cfg.anneal->sigma_sq_start *
         std::pow(cfg.sigma_sq / cfg.anneal->sigma_sq_start, frac);
}

// Chain state with cached residual r = y - alpha * A x. A single-coordinate
// update touches only the nu factors of that coordinate.
class GlauberState {
 public:
  GlauberState(const SparseBinaryMatrix& a, const Measurements& meas, BinarySignal x0)
      : y_(meas.y), alpha_(meas.alpha), x_(std::move(x0)) {
    if (x_.size() != a.num_vars())
      throw std::invalid_argument("GlauberState: x0 length must equal M");
    if (y_.size() != a.num_factors())
      throw std::invalid_argument("GlauberState: y length must equal n");
    residual_ = y_;
    for (std::uint32_t v = 0; v < a.num_vars(); ++v) {
      if (x_[v] > 1) throw std::invalid_argument("GlauberState: x0 must be binary");
      if (x_[v]) {
        for (std::uint32_t f : a.factors_of(v)) residual_[f] -= alpha_;
        ++ones_;
      }
    }
    residual_sq_ = sq_norm(residual_);
  }

  const BinarySignal& x() const { return x_; }
  const std::vector<double>& residual() const { return residual_; }
  double alpha() const { return alpha_; }
  std::uint64_t step_count() const { return step_; }
  std::uint64_t ones() const { return ones_; }
  double residual_sq() const { return residual_sq_; }
  double max_drift() const { return max_drift_; }

  // E(x) = -||y - alpha A x||^2 / (2 sigma_sq) + lambda ||x||_1.
  double energy(double sigma_sq, double lambda) const {
    return -residual_sq_ / (2.0 * sigma_sq) + lambda * static_cast<double>(ones_);
  }

  // Conditional probability that coordinate `coord` equals 1 given the rest.
  // Logistic form of the Gibbs update; O(nu) using the cached residual.
  double flip_probability(const SparseBinaryMatrix& a, std::uint32_t coord, double sigma_sq,
                          double lambda) const {
    double sum = 0.0;
    for (std::uint32_t f : a.factors_of(coord)) sum += residual_[f];
    sum += static_cast<double>(a.var_degree()) * alpha_ *
           (static_cast<double>(x_[coord]) - 0.5);
    return logistic(lambda + alpha_ / sigma_sq * sum);
  }

  // One Glauber update: uniform coordinate, resampled from its conditional.
  // Returns true if the coordinate value changed.
  bool step(const SparseBinaryMatrix& a, double sigma_sq, double lambda,
            std::mt19937_64& gen) {
    const auto coord = static_cast<std::uint32_t>(uniform_below(gen, a.num_vars()));
    const double p1 = flip_probability(a, coord, sigma_sq, lambda);
    const std::uint8_t value = uniform01(gen) < p1 ? 1 : 0;
    ++step_;
    if (value == x_[coord]) return false;
    const double delta = alpha_ * (static_cast<double>(value) - static_cast<double>(x_[coord]));
    double dsq = 0.0;
    for (std::uint32_t f : a.factors_of(coord)) {
      const double before = residual_[f];
      const double after = before - delta;
      residual_[f] = after;
      dsq += after * after - before * before;
    }
    residual_sq_ += dsq;
    ones_ += value ? 1 : -1;
    x_[coord] = value;
    return true;
  }

  // Full recomputation of the residual; records the worst incremental drift
  // seen so far (relative to the residual's own scale).
  void refresh(const SparseBinaryMatrix& a) {
    std::vector<double> exact = y_;
    for (std::uint32_t v = 0; v < a.num_vars(); ++v)
      if (x_[v])
        for (std::uint32_t f : a.factors_of(v)) exact[f] -= alpha_;
    double scale = 1.0, drift = 0.0;
    for (const double r : exact) scale = std::max(scale, std::abs(r));
    for (std::size_t f = 0; f < exact.size(); ++f)
      drift = std::max(drift, std::abs(exact[f] - residual_[f]));
    max_drift_ = std::max(max_drift_, drift / scale);
    residual_ = std::move(exact);
    residual_sq_ = sq_norm(residual_);
  }

 private:
  static double sq_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (const double r : v) acc += r * r;
    return acc;
  }

  std::vector<double> y_;
  double alpha_ = 1.0;
  BinarySignal x_;
  std::vector<double> residual_;
  double residual_sq_ = 0.0;
  std::uint64_t ones_ = 0;
  std::uint64_t step_ = 0;
  double max_drift_ = 0.0;
};

struct TrajectoryPoint {
  std::uint64_t step = 0;
  double energy = 0.0;
  double ber = std::numeric_limits<double>::quiet_NaN();  // NaN without a reference
};

struct GlauberResult {
  BinarySignal x_hat;
  std::vector<double> p1;  // soft output: P(x_i = 1 | rest) at the final state
  std::vector<TrajectoryPoint> trajectory;
  double final_energy = 0.0;
  double max_residual_drift = 0.0;
};

// Runs T steps of Glauber dynamics from x0 and returns the final state, the
// per-coordinate soft output, and (optionally) the sampled trajectory. The
// residual is refreshed from scratch every M steps to bound float drift.
// If `reference` is given, trajectory rows carry BER against it, normalized
// by `reference_k`.
inline GlauberResult glauber_run(const SparseBinaryMatrix& a, const Measurements& meas,
                                 const GlauberConfig& cfg, const BinarySignal& x0,
                                 const BinarySignal* reference = nullptr,
                                 double reference_k = 0.0) {
  cfg.validate();
  if (reference && !(reference_k > 0.0))
    throw std::invalid_argument("glauber_run: reference requires positive reference_k");
  GlauberState state(a, meas, x0);
  std::mt19937_64 gen(cfg.seed);
  const std::uint64_t refresh_every = a.num_vars();

  GlauberResult out;
  auto record = [&](std::uint64_t t) {
    TrajectoryPoint p;
    p.step = t;
    p.energy = state.energy(cfg.sigma_sq, cfg.lambda);
    if (reference) p.ber = ber(state.x(), *reference, reference_k);
    out.trajectory.push_back(p);
  };

  for (std::uint64_t t = 0; t < cfg.steps; ++t) {
    if (cfg.record_trajectory && t % cfg.trajectory_stride == 0) record(t);
    state.step(a, effective_sigma_sq(cfg, t), cfg.lambda, gen);
    if ((t + 1) % refresh_every == 0) state.refresh(a);
  }
  // In-loop rows are pre-step states at multiples of the stride; the state
  // after all T steps is recorded here (for T = 0 this is the single row 0).
  if (cfg.record_trajectory) record(cfg.steps);

  out.p1.resize(a.num_vars());
  for (std::uint32_t v = 0; v < a.num_vars(); ++v)
    out.p1[v] = state.flip_probability(a, v, cfg.sigma_sq, cfg.lambda);
  out.final_energy = state.energy(cfg.sigma_sq, cfg.lambda);
  out.max_residual_drift = state.max_drift();
  out.x_hat = state.x();
  return out;
}

// Path-coupling mixing bound: T >= (log(1/eps) + log M) * 4 sigma^2 M /
// (4 sigma^2 - nu (s-1)), valid only when 4 sigma^2 > nu (s-1).
inline std::optional<std::uint64_t> mixing_time_bound(double sigma_sq, unsigned nu, unsigned s,
                                                      std::size_t num_vars, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("mixing_time_bound: eps must lie in (0, 1)");
  const double gap = 4.0 * sigma_sq - static_cast<double>(nu) * (s - 1.0);
  if (!(gap > 0.0)) return std::nullopt;
  const double t = (std::log(1.0 / eps) + std::log(static_cast<double>(num_vars))) *
                   4.0 * sigma_sq * static_cast<double>(num_vars) / gap;
  return static_cast<std::uint64_t>(std::ceil(t));
}

// Indices of the k largest soft outputs; ties broken by ascending index.
inline std::vector<std::uint32_t> topk_indices(const std::vector<double>& p1, std::size_t k) {
  if (k > p1.size()) throw std::invalid_argument("topk_indices: k exceeds list length");
  std::vector<std::uint32_t> idx(p1.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      return p1[a] != p1[b] ? p1[a] > p1[b] : a < b;
                    });
  idx.resize(k);
  return idx;
}

}  // namespace bcs
