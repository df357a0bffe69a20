#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bcs/amp.hpp"
#include "bcs/channel.hpp"
#include "bcs/glauber.hpp"
#include "bcs/ldpc_matrix.hpp"
#include "bcs/nnls.hpp"
#include "bcs/parallel.hpp"
#include "bcs/rng.hpp"
#include "bcs/ura.hpp"

namespace bcs {

enum class DecoderKind { glauber_zero, glauber_nnls, nnls, amp };

inline const char* to_string(DecoderKind d) {
  switch (d) {
    case DecoderKind::glauber_zero: return "glauber-zero";
    case DecoderKind::glauber_nnls: return "glauber-nnls";
    case DecoderKind::nnls: return "nnls";
    case DecoderKind::amp: return "amp";
  }
  return "?";
}

inline std::optional<DecoderKind> parse_decoder(std::string_view name) {
  if (name == "glauber-zero") return DecoderKind::glauber_zero;
  if (name == "glauber-nnls") return DecoderKind::glauber_nnls;
  if (name == "nnls") return DecoderKind::nnls;
  if (name == "amp") return DecoderKind::amp;
  return std::nullopt;
}

// Declarative BER-sweep description; a run is fully determined by this struct
// (the runtime column aside).
struct SweepConfig {
  LdpcParams ldpc{16384, 2048, 16, 128};
  std::vector<DecoderKind> decoders{DecoderKind::glauber_zero, DecoderKind::glauber_nnls,
                                    DecoderKind::nnls, DecoderKind::amp};
  std::vector<std::uint32_t> k_list{50, 100, 200, 300};
  std::vector<double> ebn0_db_grid{-2, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  std::uint64_t glauber_steps = 0;  // 0 -> 10 M lg2 M
  double anneal_sigma_sq_start = 0.0;  // 0 -> annealing off
  NnlsConfig nnls;
  std::size_t amp_iters = 25;
  unsigned threads = default_threads();
};

struct SweepRow {
  DecoderKind decoder{};
  std::uint32_t k = 0;
  double ebn0_db = 0.0;
  std::size_t trials = 0;
  double mean_ber = 0.0;
  double stderr_ber = 0.0;
  double mean_runtime_ms = 0.0;
};

struct DecodeRow {
  DecoderKind decoder{};
  std::uint32_t k = 0;
  double ebn0_db = 0.0;
  std::size_t trial = 0;
  double ber = 0.0;
  double runtime_ms = 0.0;
};

namespace detail {

inline std::uint64_t default_glauber_steps(double m) {
  return static_cast<std::uint64_t>(10.0 * m * std::log2(m));
}

struct SweepContext {
  const SweepConfig* cfg = nullptr;
  std::unique_ptr<SparseBinaryMatrix> sparse;
  std::unique_ptr<DenseGaussianMatrix> dense;
  double j_bits = 0.0;
};

inline SweepContext make_context(const SweepConfig& cfg) {
  cfg.ldpc.validate();
  SweepContext ctx;
  ctx.cfg = &cfg;
  ctx.j_bits = std::log2(static_cast<double>(cfg.ldpc.num_vars));
  bool need_sparse = false, need_dense = false;
  for (const DecoderKind d : cfg.decoders)
    (d == DecoderKind::amp ? need_dense : need_sparse) = true;
  if (need_sparse)
    ctx.sparse = std::make_unique<SparseBinaryMatrix>(
        SparseBinaryMatrix::sample_gallager(cfg.ldpc, derive_seed(cfg.master_seed, {0xA})));
  if (need_dense)
    ctx.dense = std::make_unique<DenseGaussianMatrix>(cfg.ldpc.num_factors, cfg.ldpc.num_vars,
                                                      derive_seed(cfg.master_seed, {0xD}));
  return ctx;
}

// One decode trial. The signal and noise seeds do not depend on the decoder,
// so decoders face identical instances and curves can be compared pairwise.
inline DecodeRow one_trial(const SweepContext& ctx, DecoderKind dec, std::uint32_t k,
                           std::size_t grid_idx, double ebn0_db, std::size_t trial) {
  const SweepConfig& cfg = *ctx.cfg;
  const std::uint32_t m = cfg.ldpc.num_vars;
  const double rho = static_cast<double>(k) / m;
  const double e_m = dec == DecoderKind::amp
                         ? 1.0
                         : static_cast<double>(cfg.ldpc.var_degree);
  const double sigma = ebn0_db_to_sigma(ebn0_db, e_m, ctx.j_bits);

  const std::uint64_t sx = derive_seed(cfg.master_seed, {0x51, k, grid_idx, trial});
  const std::uint64_t sz = derive_seed(cfg.master_seed, {0x52, k, grid_idx, trial});
  const std::uint64_t sd = derive_seed(
      cfg.master_seed, {0x53, static_cast<std::uint64_t>(dec), k, grid_idx, trial});

  const BinarySignal x = sample_bernoulli_signal(m, rho, sx);

  const auto start = std::chrono::steady_clock::now();
  BinarySignal x_hat;
  if (dec == DecoderKind::amp) {
    const Measurements meas = measure(*ctx.dense, x, sigma, 1.0, sz);
    x_hat = amp_run(*ctx.dense, meas.y, rho, cfg.amp_iters).x_hat;
  } else {
    const Measurements meas = measure(*ctx.sparse, x, sigma, 1.0, sz);
    if (dec == DecoderKind::nnls) {
      x_hat = round_binary(nnls_solve(*ctx.sparse, meas.y, cfg.nnls).x);
    } else {
      GlauberConfig gc;
      gc.sigma_sq = sigma * sigma;
      gc.lambda = prior_log_odds(rho);
      gc.steps = cfg.glauber_steps != 0 ? cfg.glauber_steps
                                        : default_glauber_steps(static_cast<double>(m));
      gc.seed = sd;
      if (cfg.anneal_sigma_sq_start > gc.sigma_sq)
        gc.anneal = AnnealSchedule{cfg.anneal_sigma_sq_start};
      BinarySignal x0(m, 0);
      if (dec == DecoderKind::glauber_nnls)
        x0 = round_binary(nnls_solve(*ctx.sparse, meas.y, cfg.nnls).x);
      x_hat = glauber_run(*ctx.sparse, meas, gc, x0).x_hat;
    }
  }
  const auto stop = std::chrono::steady_clock::now();

  DecodeRow row;
  row.decoder = dec;
  row.k = k;
  row.ebn0_db = ebn0_db;
  row.trial = trial;
  row.ber = ber(x, x_hat, static_cast<double>(k));
  row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return row;
}

}  // namespace detail

// Per-trial decodes for one (decoder, k, Eb/N0) cell.
inline std::vector<DecodeRow> run_decode_trials(const SweepConfig& cfg, DecoderKind dec,
                                                std::uint32_t k, double ebn0_db) {
  const detail::SweepContext ctx = detail::make_context(cfg);
  std::vector<DecodeRow> rows(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
    rows[t] = detail::one_trial(ctx, dec, k, 0, ebn0_db, t);
  });
  return rows;
}

// Full sweep over decoders x k x Eb/N0; one aggregated row per cell. Trials
// fan out to a worker pool; per-trial seeds are derived from the master seed
// and indices, so the output is independent of the thread count.
inline std::vector<SweepRow> run_ber_sweep(const SweepConfig& cfg) {
  const detail::SweepContext ctx = detail::make_context(cfg);
  std::vector<SweepRow> out;
  std::vector<DecodeRow> rows(cfg.trials);
  for (const DecoderKind dec : cfg.decoders)
    for (const std::uint32_t k : cfg.k_list)
      for (std::size_t g = 0; g < cfg.ebn0_db_grid.size(); ++g) {
        parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
          rows[t] = detail::one_trial(ctx, dec, k, g, cfg.ebn0_db_grid[g], t);
        });
        SweepRow row;
        row.decoder = dec;
        row.k = k;
        row.ebn0_db = cfg.ebn0_db_grid[g];
        row.trials = cfg.trials;
        double mean = 0.0, ms = 0.0;
        for (const DecodeRow& r : rows) {
          mean += r.ber;
          ms += r.runtime_ms;
        }
        mean /= static_cast<double>(cfg.trials);
        ms /= static_cast<double>(cfg.trials);
        double var = 0.0;
        for (const DecodeRow& r : rows) var += (r.ber - mean) * (r.ber - mean);
        var /= static_cast<double>(std::max<std::size_t>(1, cfg.trials - 1));
        row.mean_ber = mean;
        row.stderr_ber = std::sqrt(var / static_cast<double>(cfg.trials));
        row.mean_runtime_ms = ms;
        out.push_back(row);
      }
  return out;
}

struct TrajectoryConfig {
  LdpcParams ldpc{16384, 2048, 16, 128};
  std::uint32_t k = 100;       // paper-style preset: k = 100 at 1 dB
  double ebn0_db = 1.0;
  DecoderKind decoder = DecoderKind::glauber_zero;  // glauber-* only
  std::uint64_t steps = 0;     // 0 -> 10 M lg2 M
  std::uint64_t stride = 0;    // 0 -> ~200 points
  std::uint64_t master_seed = 1;
  double anneal_sigma_sq_start = 0.0;
  NnlsConfig nnls;
};

struct TrajectoryRun {
  std::vector<TrajectoryPoint> points;
  double true_energy = 0.0;  // energy of the true signal under the same y
  double mj_unit = 0.0;      // M lg2 M, the x-axis unit
  double final_ber = 0.0;
  std::uint64_t steps = 0;
};

// Single recorded decode; emits the energy/BER trace plus the true signal's
// energy as the reference level.
inline TrajectoryRun run_trajectory(const TrajectoryConfig& cfg) {
  cfg.ldpc.validate();
  if (cfg.decoder != DecoderKind::glauber_zero && cfg.decoder != DecoderKind::glauber_nnls)
    throw std::invalid_argument("run_trajectory: trajectory requires a glauber decoder");
  const std::uint32_t m = cfg.ldpc.num_vars;
  const double j_bits = std::log2(static_cast<double>(m));
  const double rho = static_cast<double>(cfg.k) / m;
  const double sigma =
      ebn0_db_to_sigma(cfg.ebn0_db, static_cast<double>(cfg.ldpc.var_degree), j_bits);

  const SparseBinaryMatrix a =
      SparseBinaryMatrix::sample_gallager(cfg.ldpc, derive_seed(cfg.master_seed, {0xA}));
  const BinarySignal x = sample_bernoulli_signal(m, rho, derive_seed(cfg.master_seed, {0x51}));
  const Measurements meas = measure(a, x, sigma, 1.0, derive_seed(cfg.master_seed, {0x52}));

  GlauberConfig gc;
  gc.sigma_sq = sigma * sigma;
  gc.lambda = prior_log_odds(rho);
  gc.steps = cfg.steps != 0 ? cfg.steps
                            : detail::default_glauber_steps(static_cast<double>(m));
  gc.seed = derive_seed(cfg.master_seed, {0x53});
  gc.record_trajectory = true;
  gc.trajectory_stride = cfg.stride != 0 ? cfg.stride : std::max<std::uint64_t>(1, gc.steps / 200);
  if (cfg.anneal_sigma_sq_start > gc.sigma_sq)
    gc.anneal = AnnealSchedule{cfg.anneal_sigma_sq_start};

  BinarySignal x0(m, 0);
  if (cfg.decoder == DecoderKind::glauber_nnls)
    x0 = round_binary(nnls_solve(a, meas.y, cfg.nnls).x);

  const GlauberResult res =
      glauber_run(a, meas, gc, x0, &x, static_cast<double>(cfg.k));

  TrajectoryRun out;
  out.points = res.trajectory;
  out.mj_unit = static_cast<double>(m) * j_bits;
  out.steps = gc.steps;
  out.final_ber = ber(x, res.x_hat, static_cast<double>(cfg.k));
  GlauberState truth(a, meas, x);
  out.true_energy = truth.energy(gc.sigma_sq, gc.lambda);
  return out;
}

struct E2eConfig {
  UraConfig ura;  // k is overridden per entry of k_list
  std::vector<std::uint32_t> k_list{25, 50, 100, 150, 200, 250, 300};
  BudgetGrid grid;
  std::uint64_t master_seed = 1;
  unsigned threads = default_threads();
};

struct E2eKResult {
  std::uint32_t k = 0;
  BudgetResult budget;
  std::string skip_reason;  // nonempty when this k could not be swept
};

// Runs the budget optimizer per k. A k whose configuration is invalid (e.g.
// slot divisibility) or whose grid has no feasible point is reported and the
// run continues.
inline std::vector<E2eKResult> run_e2e(const E2eConfig& cfg) {
  std::vector<E2eKResult> out;
  std::unique_ptr<SparseBinaryMatrix> sparse;
  std::unique_ptr<DenseGaussianMatrix> dense;
  for (const std::uint32_t k : cfg.k_list) {
    E2eKResult item;
    item.k = k;
    UraConfig ura = cfg.ura;
    ura.k = k;
    try {
      ura.validate();
      if (ura.decoder == Phase1Decoder::amp) {
        if (!dense)
          dense = std::make_unique<DenseGaussianMatrix>(ura.n_phase1, ura.num_messages(),
                                                        derive_seed(cfg.master_seed, {0xD}));
        item.budget = sweep_budget(ura, *dense, cfg.grid, cfg.master_seed, cfg.threads);
      } else {
        if (!sparse)
          sparse = std::make_unique<SparseBinaryMatrix>(SparseBinaryMatrix::sample_gallager(
              ura.ldpc_params(), derive_seed(cfg.master_seed, {0xA})));
        item.budget = sweep_budget(ura, *sparse, cfg.grid, cfg.master_seed, cfg.threads);
      }
      if (!item.budget.best_index) item.skip_reason = "no feasible grid point";
    } catch (const std::invalid_argument& e) {
      item.skip_reason = e.what();
    }
    out.push_back(std::move(item));
  }
  return out;
}

// ---- CSV emission ----------------------------------------------------------
// All writers start with a "# schema=1" comment; rows are locale-independent.

namespace detail {

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string fmt_ms(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace detail

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "# schema=1\n";
  out << "decoder,k,ebn0_db,trials,mean_ber,stderr_ber,mean_runtime_ms\n";
  for (const SweepRow& r : rows)
    out << to_string(r.decoder) << ',' << r.k << ',' << detail::fmt_g(r.ebn0_db) << ','
        << r.trials << ',' << detail::fmt_g(r.mean_ber) << ',' << detail::fmt_g(r.stderr_ber)
        << ',' << detail::fmt_ms(r.mean_runtime_ms) << '\n';
}

inline void write_decode_csv(std::ostream& out, const std::vector<DecodeRow>& rows) {
  out << "# schema=1\n";
  out << "decoder,k,ebn0_db,trial,ber,runtime_ms\n";
  for (const DecodeRow& r : rows)
    out << to_string(r.decoder) << ',' << r.k << ',' << detail::fmt_g(r.ebn0_db) << ','
        << r.trial << ',' << detail::fmt_g(r.ber) << ',' << detail::fmt_ms(r.runtime_ms)
        << '\n';
}

// Trajectory rows use the step axis in units of M lg2 M; reference levels of
// the true signal are emitted as comments.
inline void write_trajectory_csv(std::ostream& out, const TrajectoryRun& run) {
  out << "# schema=1\n";
  out << "# true_energy=" << detail::fmt_g(run.true_energy) << '\n';
  out << "# true_ber=0\n";
  out << "step,energy,ber\n";
  for (const TrajectoryPoint& p : run.points)
    out << detail::fmt_g(static_cast<double>(p.step) / run.mj_unit) << ','
        << detail::fmt_g(p.energy) << ',' << detail::fmt_g(p.ber) << '\n';
}

inline void write_e2e_csv(std::ostream& out, const std::vector<E2eKResult>& results) {
  out << "# schema=1\n";
  out << "k,phase1_ebn0_db,eps1,eps1_stderr,eps2,p_star,total_ebn0_db,feasible\n";
  for (const E2eKResult& kr : results) {
    for (const BudgetRow& r : kr.budget.rows)
      out << kr.k << ',' << detail::fmt_g(r.phase1_ebn0_db) << ',' << detail::fmt_g(r.eps1)
          << ',' << detail::fmt_g(r.eps1_stderr) << ',' << detail::fmt_g(r.eps2) << ','
          << detail::fmt_g(r.feasible ? r.p_star : 0.0) << ','
          << detail::fmt_g(r.feasible ? r.total_ebn0_db : 0.0) << ',' << (r.feasible ? 1 : 0)
          << '\n';
    if (!kr.skip_reason.empty())
      out << "# k=" << kr.k << " infeasible: " << kr.skip_reason << '\n';
    else
      out << "# k=" << kr.k
          << " best: phase1_ebn0_db=" << detail::fmt_g(kr.budget.best().phase1_ebn0_db)
          << " total_ebn0_db=" << detail::fmt_g(kr.budget.best().total_ebn0_db) << '\n';
  }
}

}  // namespace bcs
