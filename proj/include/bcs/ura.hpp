#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcs/amp.hpp"
#include "bcs/channel.hpp"
#include "bcs/glauber.hpp"
#include "bcs/ldpc_matrix.hpp"
#include "bcs/nnls.hpp"
#include "bcs/parallel.hpp"
#include "bcs/rng.hpp"
#include "bcs/special.hpp"

namespace bcs {

enum class Phase1Decoder { glauber_zero, glauber_nnls, amp };

// Grant-based random access over n channel uses: phase 1 detects the k active
// J-bit prefixes by compressed sensing over n1 uses; phase 2 (feedback
// scheduling) is free and error-free by construction; phase 3 carries the
// remaining B-J bits per user in slots of length n' = (n - n1)/k, accounted
// analytically through the normal approximation.
struct UraConfig {
  std::uint32_t k = 0;             // active users
  std::uint32_t message_bits = 0;  // B
  std::uint32_t prefix_bits = 0;   // J; phase-1 codebook has M = 2^J columns
  std::uint32_t n_total = 0;       // n
  std::uint32_t n_phase1 = 0;      // n1
  double alpha = 1.0;              // phase-1 column amplitude
  double target_pupe = 0.05;
  Phase1Decoder decoder = Phase1Decoder::glauber_zero;
  std::uint32_t var_degree = 16;   // nu of the phase-1 LDPC matrix
  std::uint64_t glauber_steps = 0; // 0 -> 10 M lg2(M)
  std::size_t amp_iters = 25;

  std::uint32_t num_messages() const { return 1u << prefix_bits; }
  std::uint32_t n_phase3() const { return n_total - n_phase1; }
  std::uint32_t slot_length() const { return n_phase3() / k; }

  void validate() const {
    if (k == 0) throw std::invalid_argument("UraConfig: k must be positive");
    if (prefix_bits == 0 || prefix_bits >= message_bits)
      throw std::invalid_argument("UraConfig: need 0 < J < B");
    if (prefix_bits > 26) throw std::invalid_argument("UraConfig: J too large to simulate");
    if (n_phase1 == 0 || n_phase1 >= n_total)
      throw std::invalid_argument("UraConfig: need 0 < n1 < n");
    if (n_phase3() % k != 0)
      throw std::invalid_argument("UraConfig: n - n1 must be divisible by k");
    if (!(alpha > 0.0)) throw std::invalid_argument("UraConfig: alpha must be positive");
    if (!(target_pupe > 0.0 && target_pupe < 0.5))
      throw std::invalid_argument("UraConfig: target_pupe must lie in (0, 0.5)");
    if (decoder == Phase1Decoder::amp && alpha != 1.0)
      throw std::invalid_argument("UraConfig: the AMP pipeline assumes alpha = 1");
  }

  LdpcParams ldpc_params() const {
    const std::uint64_t edges = static_cast<std::uint64_t>(var_degree) * num_messages();
    if (edges % n_phase1 != 0)
      throw std::invalid_argument("UraConfig: nu * 2^J must be divisible by n1");
    return {num_messages(), n_phase1, var_degree,
            static_cast<std::uint32_t>(edges / n_phase1)};
  }

  // Energy of a transmitted phase-1 column.
  double phase1_column_energy() const {
    return decoder == Phase1Decoder::amp ? 1.0 : alpha * alpha * var_degree;
  }
};

struct PhaseOneResult {
  std::vector<std::uint32_t> list;     // the k prefixes the receiver outputs
  std::vector<std::uint8_t> collided;  // per user: prefix chosen by someone else too
  std::vector<std::uint8_t> in_list;   // per user: own prefix entered the list

  // Per-trial per-user error fraction: collision or list miss.
  double per_user_error() const {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < collided.size(); ++i) bad += collided[i] || !in_list[i];
    return static_cast<double>(bad) / static_cast<double>(collided.size());
  }
};

namespace detail {

inline PhaseOneResult phase1_from_soft(const std::vector<double>& p1,
                                       const std::vector<std::uint32_t>& prefixes,
                                       const CountSignal& counts, std::uint32_t k) {
  PhaseOneResult res;
  res.list = topk_indices(p1, k);
  std::vector<std::uint8_t> member(p1.size(), 0);
  for (const std::uint32_t m : res.list) member[m] = 1;
  res.collided.resize(prefixes.size());
  res.in_list.resize(prefixes.size());
  for (std::size_t u = 0; u < prefixes.size(); ++u) {
    res.collided[u] = counts[prefixes[u]] > 1;
    res.in_list[u] = member[prefixes[u]];
  }
  return res;
}

template <class Matrix>
std::pair<std::vector<std::uint32_t>, CountSignal> draw_prefixes(const UraConfig& cfg,
                                                                 const Matrix& a,
                                                                 std::mt19937_64& gen) {
  if (a.num_vars() != cfg.num_messages())
    throw std::invalid_argument("simulate_phase1: matrix has wrong column count");
  std::vector<std::uint32_t> prefixes(cfg.k);
  CountSignal counts(cfg.num_messages(), 0);
  for (auto& p : prefixes) {
    p = static_cast<std::uint32_t>(uniform_below(gen, cfg.num_messages()));
    ++counts[p];
  }
  return {std::move(prefixes), std::move(counts)};
}

}  // namespace detail

// One phase-1 trial with the sparse pipeline: draw k uniform prefixes, form
// the count signal, measure y = alpha A x + sigma z, decode, keep the top-k
// soft outputs. Decoding runs at the channel noise level (floored when
// sigma = 0) with the binary sparsity prior rho = k / M.
inline PhaseOneResult simulate_phase1(const UraConfig& cfg, const SparseBinaryMatrix& a,
                                      double sigma, std::uint64_t seed) {
  cfg.validate();
  if (cfg.decoder == Phase1Decoder::amp)
    throw std::invalid_argument("simulate_phase1: AMP pipeline needs a dense matrix");
  std::mt19937_64 gen(seed);
  auto [prefixes, counts] = detail::draw_prefixes(cfg, a, gen);
  const Measurements meas = measure(a, counts, sigma, cfg.alpha, derive_seed(seed, {0xC0DE}));

  const double m = static_cast<double>(cfg.num_messages());
  GlauberConfig gc;
  gc.sigma_sq = std::max(sigma * sigma, 1e-6);
  gc.lambda = prior_log_odds(static_cast<double>(cfg.k) / m);
  gc.steps = cfg.glauber_steps != 0
                 ? cfg.glauber_steps
                 : static_cast<std::uint64_t>(10.0 * m * std::log2(m));
  gc.seed = derive_seed(seed, {0x61});

  BinarySignal x0(cfg.num_messages(), 0);
  if (cfg.decoder == Phase1Decoder::glauber_nnls)
    x0 = round_binary(nnls_solve(a, meas.y, {}, cfg.alpha).x);
  const GlauberResult dec = glauber_run(a, meas, gc, x0);
  return detail::phase1_from_soft(dec.p1, prefixes, counts, cfg.k);
}

// Dense-matrix variant: AMP soft outputs ranked directly.
inline PhaseOneResult simulate_phase1(const UraConfig& cfg, const DenseGaussianMatrix& a,
                                      double sigma, std::uint64_t seed) {
  cfg.validate();
  if (cfg.decoder != Phase1Decoder::amp)
    throw std::invalid_argument("simulate_phase1: dense matrix is for the AMP pipeline");
  if (a.cols() != cfg.num_messages())
    throw std::invalid_argument("simulate_phase1: matrix has wrong column count");
  std::mt19937_64 gen(seed);
  std::vector<std::uint32_t> prefixes(cfg.k);
  CountSignal counts(cfg.num_messages(), 0);
  for (auto& p : prefixes) {
    p = static_cast<std::uint32_t>(uniform_below(gen, cfg.num_messages()));
    ++counts[p];
  }
  const Measurements meas = measure(a, counts, sigma, 1.0, derive_seed(seed, {0xC0DE}));
  const AmpResult dec =
      amp_run(a, meas.y, static_cast<double>(cfg.k) / cfg.num_messages(), cfg.amp_iters);
  return detail::phase1_from_soft(dec.x_soft, prefixes, counts, cfg.k);
}

// AWGN capacity C(P) = (1/2) lg2(1 + P), in bits per channel use.
inline double awgn_capacity(double p) {
  if (p < 0.0) throw std::invalid_argument("awgn_capacity: power must be nonnegative");
  return 0.5 * std::log2(1.0 + p);
}

// AWGN dispersion V(P) = P(P+2)/(2(P+1)^2) * (lg2 e)^2, in bits^2.
inline double awgn_dispersion(double p) {
  if (p < 0.0) throw std::invalid_argument("awgn_dispersion: power must be nonnegative");
  const double lg2e = 1.4426950408889634;  // log2(e)
  return p * (p + 2.0) / (2.0 * (p + 1.0) * (p + 1.0)) * lg2e * lg2e;
}

// Smallest power P satisfying the normal-approximation equality
//   bits/n' = C(P) - sqrt(V(P)/n') Q^{-1}(eps2),
// solved by bisection over [1e-6, 1e6]. eps2 = 0.5 reduces to C(P) = rate.
inline double solve_p_star(double bits, double slot_length, double eps2) {
  if (!(bits > 0.0) || !(slot_length > 0.0))
    throw std::invalid_argument("solve_p_star: bits and n' must be positive");
  if (!(eps2 > 0.0 && eps2 <= 0.5))
    throw std::invalid_argument("solve_p_star: eps2 must lie in (0, 0.5]");
  const double rate = bits / slot_length;
  const double qinv = eps2 == 0.5 ? 0.0 : q_inv(eps2);
  auto gap = [&](double p) {
    return awgn_capacity(p) - std::sqrt(awgn_dispersion(p) / slot_length) * qinv - rate;
  };
  double lo = 1e-6, hi = 1e6;
  if (!(gap(lo) < 0.0) || !(gap(hi) > 0.0))
    throw std::runtime_error("solve_p_star: rate infeasible within power bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Total energy per transmitted bit (linear):
//   (n' P* / 2 + J * (Eb/N0)_phase1) / B.
inline double total_ebn0_linear(const UraConfig& cfg, double p_star,
                                double phase1_ebn0_linear) {
  if (!(p_star >= 0.0) || !(phase1_ebn0_linear >= 0.0))
    throw std::invalid_argument("total_ebn0_linear: arguments must be nonnegative");
  return (0.5 * cfg.slot_length() * p_star + cfg.prefix_bits * phase1_ebn0_linear) /
         cfg.message_bits;
}

struct BudgetGrid {
  double start_db = 0.0;
  double stop_db = 0.0;
  double step_db = 0.25;
  std::size_t trials = 200;

  std::vector<double> points() const {
    if (!(step_db > 0.0)) throw std::invalid_argument("BudgetGrid: step must be positive");
    if (stop_db < start_db) throw std::invalid_argument("BudgetGrid: empty window");
    std::vector<double> out;
    for (int i = 0;; ++i) {
      const double db = start_db + i * step_db;
      if (db > stop_db + 1e-9) break;
      out.push_back(db);
    }
    return out;
  }
};

struct BudgetRow {
  double phase1_ebn0_db = 0.0;
  double eps1 = 0.0;
  double eps1_stderr = 0.0;
  double eps2 = 0.0;
  double p_star = 0.0;
  double total_ebn0_db = 0.0;
  bool feasible = false;
};

struct BudgetResult {
  std::vector<BudgetRow> rows;            // one per grid point, in grid order
  std::optional<std::size_t> best_index;  // argmin of total over feasible rows
  const BudgetRow& best() const { return rows[best_index.value()]; }
};

// Sweeps the phase-1 energy grid: Monte-Carlo eps1 per point, eps2 = target -
// eps1 (infeasible when <= 0), P* from the normal approximation, and the total
// energy per bit. Returns all rows plus the feasible argmin if one exists.
// Trials use counter-derived seeds so the result is independent of the thread
// count.
template <class Matrix>
BudgetResult sweep_budget(const UraConfig& cfg, const Matrix& a, const BudgetGrid& grid,
                          std::uint64_t master_seed, unsigned threads = 1) {
  cfg.validate();
  const std::vector<double> dbs = grid.points();
  if (dbs.empty() || grid.trials == 0)
    throw std::invalid_argument("sweep_budget: empty grid");
  const double e_m = cfg.phase1_column_energy();

  BudgetResult res;
  res.rows.resize(dbs.size());
  for (std::size_t g = 0; g < dbs.size(); ++g) {
    const double sigma = ebn0_db_to_sigma(dbs[g], e_m, cfg.prefix_bits);
    std::vector<double> err(grid.trials);
    parallel_for(grid.trials, threads, [&](std::size_t t) {
      const std::uint64_t seed = derive_seed(master_seed, {0xE2E, cfg.k, g, t});
      err[t] = simulate_phase1(cfg, a, sigma, seed).per_user_error();
    });
    double mean = 0.0;
    for (const double e : err) mean += e;
    mean /= static_cast<double>(grid.trials);
    double var = 0.0;
    for (const double e : err) var += (e - mean) * (e - mean);
    var /= static_cast<double>(std::max<std::size_t>(1, grid.trials - 1));

    BudgetRow& row = res.rows[g];
    row.phase1_ebn0_db = dbs[g];
    row.eps1 = mean;
    row.eps1_stderr = std::sqrt(var / static_cast<double>(grid.trials));
    row.eps2 = cfg.target_pupe - mean;
    if (row.eps2 > 0.0) {
      try {
        row.p_star = solve_p_star(static_cast<double>(cfg.message_bits - cfg.prefix_bits),
                                  cfg.slot_length(), row.eps2);
        const double total =
            total_ebn0_linear(cfg, row.p_star, std::pow(10.0, dbs[g] / 10.0));
        row.total_ebn0_db = 10.0 * std::log10(total);
        row.feasible = true;
      } catch (const std::runtime_error&) {
        row.feasible = false;
      }
    }
    if (row.feasible &&
        (!res.best_index || row.total_ebn0_db < res.rows[*res.best_index].total_ebn0_db))
      res.best_index = g;
  }
  return res;
}

// As sweep_budget, but an empty feasible set is an error.
template <class Matrix>
BudgetResult optimize_budget(const UraConfig& cfg, const Matrix& a, const BudgetGrid& grid,
                             std::uint64_t master_seed, unsigned threads = 1) {
  BudgetResult res = sweep_budget(cfg, a, grid, master_seed, threads);
  if (!res.best_index) throw std::runtime_error("optimize_budget: no feasible grid point");
  return res;
}

inline std::string to_string(Phase1Decoder d) {
  switch (d) {
    case Phase1Decoder::glauber_zero: return "glauber-zero";
    case Phase1Decoder::glauber_nnls: return "glauber-nnls";
    case Phase1Decoder::amp: return "amp";
  }
  return "?";
}

}  // namespace bcs
