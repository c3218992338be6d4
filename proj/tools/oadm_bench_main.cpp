#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bench_lib.hpp"
#include "oadm/error.hpp"

namespace {

using oadm::DataGenConfig;
using oadm::ProblemKind;
using oadm::bench::ExperimentConfig;

void add_run_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--instance", cfg.instance_path, "instance file")->required();
  cmd->add_option("--solver", cfg.solvers, "oadm|admm|fobos|rda (repeatable)");
  cmd->add_option("--passes", cfg.passes, "cyclic passes over the N examples");
  cmd->add_option("--rho", cfg.rho, "penalty parameter");
  cmd->add_option("--eta", cfg.eta, "proximal weight (constant or slope)");
  cmd->add_option("--eta-kind", cfg.eta_kind, "constant|linear");
  cmd->add_option("--gamma", cfg.gamma, "rda proximal strength");
  cmd->add_option("--fobos-rho", cfg.fobos_rho, "fobos tau scale (0 = auto)");
  cmd->add_flag("--fobos-fixed-tau", cfg.fobos_fixed_tau, "constant fobos tau");
  cmd->add_option("--out", cfg.out_dir, "output directory")
      ->envname("OADM_BENCH_OUTDIR");
  cmd->add_flag("--split", cfg.split_files, "one CSV per solver");
  cmd->add_flag("!--no-regret", cfg.with_regret, "skip regret columns");
  cmd->add_option("--stride", cfg.stride, "emit every stride-th round");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized-lasso benchmark harness"};
  app.require_subcommand(1);
  app.set_config("--config");
  app.allow_config_extras(CLI::config_extras_mode::error);

  DataGenConfig gen_cfg;
  std::string gen_problem = "lasso";
  std::string gen_out = "instance.genlasso";
  double gen_lambda = -1.0;
  CLI::App* gen = app.add_subcommand("gen", "generate an instance file");
  gen->add_option("--problem", gen_problem, "lasso|tv");
  gen->add_option("--N", gen_cfg.N, "number of examples");
  gen->add_option("--n", gen_cfg.n, "dimension");
  gen->add_option("--k", gen_cfg.k, "nonzero count (lasso)");
  gen->add_option("--segments", gen_cfg.segments, "segment count (tv)");
  gen->add_option("--noise-sigma", gen_cfg.noise_sigma, "gaussian noise level");
  gen->add_option("--q", gen_cfg.q, "lambda = q * ||A^T b / N||_inf");
  gen->add_option("--lambda", gen_lambda, "explicit lambda (overrides --q)");
  gen->add_option("--seed", gen_cfg.seed, "rng seed")->required();
  gen->add_option("--out", gen_out, "output path")->envname("OADM_BENCH_OUTDIR");

  ExperimentConfig run_cfg;
  CLI::App* run = app.add_subcommand("run", "run solvers, write metric CSVs");
  add_run_options(run, run_cfg);

  ExperimentConfig cmp_cfg;
  cmp_cfg.solvers = {"oadm", "admm", "fobos", "rda"};
  CLI::App* cmp = app.add_subcommand("compare", "summary table across solvers");
  add_run_options(cmp, cmp_cfg);

  ExperimentConfig tune_cfg;
  double holdout = 0.2;
  CLI::App* tune = app.add_subcommand("tune-rho", "grid-search rho by held-out error");
  add_run_options(tune, tune_cfg);
  tune->add_option("--holdout", holdout, "held-out fraction of rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      gen_cfg.kind = gen_problem == "tv" ? ProblemKind::TotalVariation
                                         : ProblemKind::Lasso;
      if (gen_problem != "tv" && gen_problem != "lasso") {
        throw oadm::ConfigError("unknown problem: " + gen_problem);
      }
      if (gen_lambda >= 0.0) gen_cfg.lambda_override = gen_lambda;
      oadm::bench::cmd_gen(gen_cfg, gen_out);
      std::printf("wrote %s\n", gen_out.c_str());
    } else if (run->parsed()) {
      for (const std::string& path : oadm::bench::cmd_run(run_cfg)) {
        std::printf("wrote %s\n", path.c_str());
      }
    } else if (cmp->parsed()) {
      oadm::bench::cmd_compare(cmp_cfg);
    } else if (tune->parsed()) {
      const oadm::bench::TuneResult result =
          oadm::bench::cmd_tune_rho(tune_cfg, holdout);
      for (const auto& [rho, err] : result.grid) {
        std::printf("rho=%g holdout_mse=%.10g\n", rho, err);
      }
      std::printf("best_rho=%g\n", result.best_rho);
    }
  } catch (const oadm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
