// Command-line front end: matrix generation, single decodes, BER sweeps,
// trajectory dumps and the end-to-end random-access budget optimizer. Every
// subcommand is a pure function of its flags and master seed (runtime columns
// aside) and emits versioned CSV to stdout or --output.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bcs/channel.hpp"
#include "bcs/expansion.hpp"
#include "bcs/experiments.hpp"
#include "bcs/ldpc_matrix.hpp"
#include "bcs/ura.hpp"

namespace {

struct OutputTarget {
  std::string path;  // empty -> stdout

  template <class Fn>
  void write(Fn&& fn) const {
    if (path.empty()) {
      fn(std::cout);
      std::cout.flush();
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    fn(out);
    if (!out) throw std::runtime_error("write failed: " + path);
  }
};

bcs::LdpcParams ldpc_from_flags(std::uint64_t m, std::uint64_t n, std::uint64_t nu) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  const std::uint64_t edges = nu * m;
  if (edges == 0 || edges % n != 0)
    throw std::invalid_argument("nu*M must be a positive multiple of n");
  bcs::LdpcParams p{static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n),
                    static_cast<std::uint32_t>(nu), static_cast<std::uint32_t>(edges / n)};
  p.validate();
  return p;
}

bcs::DecoderKind decoder_from_name(const std::string& name) {
  const auto d = bcs::parse_decoder(name);
  if (!d) throw std::invalid_argument("unknown decoder: " + name);
  return *d;
}

void add_matrix_flags(CLI::App* cmd, std::uint64_t& m, std::uint64_t& n, std::uint64_t& nu) {
  cmd->add_option("--M", m, "number of columns / variables")->capture_default_str();
  cmd->add_option("--n", n, "number of rows / factors")->capture_default_str();
  cmd->add_option("--nu", nu, "variable degree")->capture_default_str();
}

int run(int argc, char** argv) {
  CLI::App app{"compressed sensing of sparse binary signals: LDPC sensing "
               "matrices, Glauber-dynamics decoding, NNLS and AMP baselines"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override it");
  app.config_formatter(std::make_shared<CLI::ConfigTOML>());

  // gen-matrix
  auto* gen = app.add_subcommand("gen-matrix", "sample a sensing matrix and write it");
  std::uint64_t gm_m = 0, gm_n = 0, gm_nu = 0, gm_seed = 0;
  std::string gm_out;
  gen->add_option("--M", gm_m, "number of columns / variables")->required();
  gen->add_option("--n", gm_n, "number of rows / factors")->required();
  gen->add_option("--nu", gm_nu, "variable degree")->required();
  gen->add_option("--seed", gm_seed, "sampling seed")->capture_default_str();
  gen->add_option("-o,--output", gm_out, "output path (default: stdout)");

  // decode
  auto* dec = app.add_subcommand("decode", "run single decode trials at one operating point");
  std::uint64_t dc_m = 16384, dc_n = 2048, dc_nu = 16;
  std::uint64_t dc_k = 0, dc_trials = 1, dc_seed = 1, dc_steps = 0;
  double dc_ebn0 = 0.0, dc_anneal = 0.0;
  std::string dc_decoder = "glauber-zero", dc_out;
  add_matrix_flags(dec, dc_m, dc_n, dc_nu);
  dec->add_option("--k", dc_k, "expected sparsity")->required();
  dec->add_option("--ebn0-db", dc_ebn0, "energy per bit, dB")->required();
  dec->add_option("--decoder", dc_decoder, "glauber-zero|glauber-nnls|nnls|amp")
      ->check(CLI::IsMember({"glauber-zero", "glauber-nnls", "nnls", "amp"}))
      ->capture_default_str();
  dec->add_option("--trials", dc_trials, "number of trials")->capture_default_str();
  dec->add_option("--seed", dc_seed, "master seed")->capture_default_str();
  dec->add_option("--steps", dc_steps, "Glauber steps (0: 10 M lg2 M)")->capture_default_str();
  dec->add_option("--anneal-sigma2-start", dc_anneal,
                  "starting noise variance for annealing (0: off)")->capture_default_str();
  dec->add_option("-o,--output", dc_out, "output path (default: stdout)");

  // ber-sweep
  auto* sw = app.add_subcommand("ber-sweep", "Monte-Carlo BER over decoders x k x Eb/N0");
  std::uint64_t sw_m = 16384, sw_n = 2048, sw_nu = 16, sw_trials = 100, sw_seed = 1,
                sw_steps = 0, sw_threads = 0;
  double sw_anneal = 0.0;
  std::vector<std::string> sw_decoders{"glauber-zero", "glauber-nnls", "nnls", "amp"};
  std::vector<std::uint32_t> sw_klist{50, 100, 200, 300};
  std::vector<double> sw_grid{-2, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::string sw_out;
  add_matrix_flags(sw, sw_m, sw_n, sw_nu);
  sw->add_option("--decoders", sw_decoders, "decoders to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"glauber-zero", "glauber-nnls", "nnls", "amp"}))
      ->capture_default_str();
  sw->add_option("--k-list", sw_klist, "sparsity values")->delimiter(',')->capture_default_str();
  sw->add_option("--ebn0-db-grid", sw_grid, "Eb/N0 grid, dB")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--trials", sw_trials, "trials per point")->capture_default_str();
  sw->add_option("--seed", sw_seed, "master seed")->capture_default_str();
  sw->add_option("--steps", sw_steps, "Glauber steps (0: 10 M lg2 M)")->capture_default_str();
  sw->add_option("--anneal-sigma2-start", sw_anneal,
                 "starting noise variance for annealing (0: off)")->capture_default_str();
  sw->add_option("--threads", sw_threads, "worker threads (0: hardware)")->capture_default_str();
  sw->add_option("-o,--output", sw_out, "output path (default: stdout)");

  // trajectory
  auto* tr = app.add_subcommand("trajectory", "energy/BER trace of one Glauber decode");
  std::uint64_t tr_m = 16384, tr_n = 2048, tr_nu = 16, tr_seed = 1, tr_steps = 0, tr_stride = 0;
  std::uint64_t tr_k = 100;
  double tr_ebn0 = 1.0, tr_anneal = 0.0;
  std::string tr_decoder = "glauber-zero", tr_out;
  add_matrix_flags(tr, tr_m, tr_n, tr_nu);
  tr->add_option("--k", tr_k, "expected sparsity")->capture_default_str();
  tr->add_option("--ebn0-db", tr_ebn0, "energy per bit, dB")->capture_default_str();
  tr->add_option("--decoder", tr_decoder, "glauber-zero|glauber-nnls")
      ->check(CLI::IsMember({"glauber-zero", "glauber-nnls"}))
      ->capture_default_str();
  tr->add_option("--steps", tr_steps, "Glauber steps (0: 10 M lg2 M)")->capture_default_str();
  tr->add_option("--stride", tr_stride, "recording stride (0: ~200 points)")
      ->capture_default_str();
  tr->add_option("--seed", tr_seed, "master seed")->capture_default_str();
  tr->add_option("--anneal-sigma2-start", tr_anneal,
                 "starting noise variance for annealing (0: off)")->capture_default_str();
  tr->add_option("-o,--output", tr_out, "output path (default: stdout)");

  // e2e
  auto* e2e = app.add_subcommand(
      "e2e", "three-phase random-access budget optimizer (PUPE target)");
  std::uint64_t e_b = 0, e_j = 0, e_n = 0, e_n1 = 0, e_nu = 16, e_trials = 200, e_seed = 1,
                e_steps = 0, e_threads = 0;
  double e_alpha = 1.0, e_target = 0.05, e_start = 0.0, e_stop = 0.0, e_step = 0.25;
  std::vector<std::uint32_t> e_klist{25, 50, 100, 150, 200, 250, 300};
  std::string e_decoder = "glauber-zero", e_out;
  e2e->add_option("--k-list", e_klist, "active-user counts")->delimiter(',')
      ->capture_default_str();
  e2e->add_option("--B", e_b, "message bits per user")->required();
  e2e->add_option("--J", e_j, "prefix bits detected in phase 1")->required();
  e2e->add_option("--n", e_n, "total channel uses")->required();
  e2e->add_option("--n1", e_n1, "phase-1 channel uses")->required();
  e2e->add_option("--nu", e_nu, "phase-1 LDPC variable degree")->capture_default_str();
  e2e->add_option("--alpha", e_alpha, "phase-1 column amplitude")->capture_default_str();
  e2e->add_option("--target-pupe", e_target, "per-user error budget")->capture_default_str();
  e2e->add_option("--decoder", e_decoder, "glauber-zero|glauber-nnls|amp")
      ->check(CLI::IsMember({"glauber-zero", "glauber-nnls", "amp"}))
      ->capture_default_str();
  e2e->add_option("--grid-start-db", e_start, "phase-1 Eb/N0 grid start, dB")->required();
  e2e->add_option("--grid-stop-db", e_stop, "phase-1 Eb/N0 grid stop, dB")->required();
  e2e->add_option("--grid-step-db", e_step, "grid step, dB")->capture_default_str();
  e2e->add_option("--trials", e_trials, "Monte-Carlo trials per grid point")
      ->capture_default_str();
  e2e->add_option("--steps", e_steps, "Glauber steps (0: 10 M lg2 M)")->capture_default_str();
  e2e->add_option("--seed", e_seed, "master seed")->capture_default_str();
  e2e->add_option("--threads", e_threads, "worker threads (0: hardware)")->capture_default_str();
  e2e->add_option("-o,--output", e_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gen->parsed()) {
    const bcs::LdpcParams params = ldpc_from_flags(gm_m, gm_n, gm_nu);
    const auto a = bcs::SparseBinaryMatrix::sample_gallager(params, gm_seed);
    OutputTarget{gm_out}.write([&](std::ostream& out) { a.serialize(out); });
    if (params.var_degree >= 2 && params.var_degree < params.factor_degree) {
      const double alpha_star =
          bcs::expansion_alpha_star(params.var_degree, params.factor_degree);
      std::cerr << "alpha_star=" << alpha_star
                << " k_star=" << alpha_star * params.num_vars / params.var_degree << '\n';
    }
    return 0;
  }

  if (dec->parsed()) {
    bcs::SweepConfig cfg;
    cfg.ldpc = ldpc_from_flags(dc_m, dc_n, dc_nu);
    cfg.trials = dc_trials;
    cfg.master_seed = dc_seed;
    cfg.glauber_steps = dc_steps;
    cfg.anneal_sigma_sq_start = dc_anneal;
    const auto rows = bcs::run_decode_trials(cfg, decoder_from_name(dc_decoder),
                                             static_cast<std::uint32_t>(dc_k), dc_ebn0);
    OutputTarget{dc_out}.write([&](std::ostream& out) { bcs::write_decode_csv(out, rows); });
    return 0;
  }

  if (sw->parsed()) {
    bcs::SweepConfig cfg;
    cfg.ldpc = ldpc_from_flags(sw_m, sw_n, sw_nu);
    cfg.decoders.clear();
    for (const std::string& name : sw_decoders) cfg.decoders.push_back(decoder_from_name(name));
    cfg.k_list = sw_klist;
    cfg.ebn0_db_grid = sw_grid;
    cfg.trials = sw_trials;
    cfg.master_seed = sw_seed;
    cfg.glauber_steps = sw_steps;
    cfg.anneal_sigma_sq_start = sw_anneal;
    if (sw_threads != 0) cfg.threads = static_cast<unsigned>(sw_threads);
    const auto rows = bcs::run_ber_sweep(cfg);
    OutputTarget{sw_out}.write([&](std::ostream& out) { bcs::write_sweep_csv(out, rows); });
    return 0;
  }

  if (tr->parsed()) {
    bcs::TrajectoryConfig cfg;
    cfg.ldpc = ldpc_from_flags(tr_m, tr_n, tr_nu);
    cfg.k = static_cast<std::uint32_t>(tr_k);
    cfg.ebn0_db = tr_ebn0;
    cfg.decoder = decoder_from_name(tr_decoder);
    cfg.steps = tr_steps;
    cfg.stride = tr_stride;
    cfg.master_seed = tr_seed;
    cfg.anneal_sigma_sq_start = tr_anneal;
    const auto run = bcs::run_trajectory(cfg);
    OutputTarget{tr_out}.write(
        [&](std::ostream& out) { bcs::write_trajectory_csv(out, run); });
    return 0;
  }

  bcs::E2eConfig cfg;
  cfg.ura.message_bits = static_cast<std::uint32_t>(e_b);
  cfg.ura.prefix_bits = static_cast<std::uint32_t>(e_j);
  cfg.ura.n_total = static_cast<std::uint32_t>(e_n);
  cfg.ura.n_phase1 = static_cast<std::uint32_t>(e_n1);
  cfg.ura.var_degree = static_cast<std::uint32_t>(e_nu);
  cfg.ura.alpha = e_alpha;
  cfg.ura.target_pupe = e_target;
  cfg.ura.glauber_steps = e_steps;
  if (e_decoder == "glauber-zero") cfg.ura.decoder = bcs::Phase1Decoder::glauber_zero;
  if (e_decoder == "glauber-nnls") cfg.ura.decoder = bcs::Phase1Decoder::glauber_nnls;
  if (e_decoder == "amp") cfg.ura.decoder = bcs::Phase1Decoder::amp;
  cfg.k_list = e_klist;
  cfg.grid.start_db = e_start;
  cfg.grid.stop_db = e_stop;
  cfg.grid.step_db = e_step;
  cfg.grid.trials = e_trials;
  cfg.master_seed = e_seed;
  if (e_threads != 0) cfg.threads = static_cast<unsigned>(e_threads);
  const auto results = bcs::run_e2e(cfg);
  OutputTarget{e_out}.write([&](std::ostream& out) { bcs::write_e2e_csv(out, results); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
