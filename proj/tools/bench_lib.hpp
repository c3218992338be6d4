#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oadm/genlasso.hpp"
#include "oadm/regret.hpp"

namespace oadm::bench {

// One benchmark run over an instance file: which solvers, how many cyclic
// passes, and the step-size knobs. Flags mirror these fields one-to-one.
struct ExperimentConfig {
  std::string instance_path;
  std::vector<std::string> solvers{"oadm"};  // oadm | admm | fobos | rda
  long passes = 100;
  double rho = 1.0;
  double eta = 0.0;
  std::string eta_kind = "constant";  // constant | linear (eta_t = eta * t)
  double gamma = 1.0;                 // rda proximal strength
  double fobos_rho = 0.0;             // tau_t = fobos_rho / sqrt(t+1); 0 = auto
  bool fobos_fixed_tau = false;       // tau_t = fobos_rho for all t
  std::string out_dir = ".";
  bool split_files = false;  // one CSV per solver instead of one interleaved
  bool with_regret = true;   // compute the comparator and regret columns
  long stride = 1;           // emit every stride-th round
};

inline constexpr double kNnzThreshold = 1e-6;

long count_nonzeros(const Eigen::VectorXd& v);

// Writes the instance file; byte-identical under a fixed seed.
void cmd_gen(const DataGenConfig& cfg, const std::string& out_path);

// Per-round metric rows in the schema
// t,solver,objective,nnz,primal_residual,dual_residual,R1_running,
// R2_running,Rc_running,eta_t,rho_t  (17 significant digits).
struct MetricRow {
  long t = 0;
  std::string solver;
  double objective = 0.0;
  long nnz = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double r1_running = 0.0;
  double r2_running = 0.0;
  double rc_running = 0.0;
  double eta_t = 0.0;
  double rho_t = 0.0;
};

struct SolverRunOutput {
  std::string solver;
  std::vector<MetricRow> rows;
  Eigen::VectorXd final_signal;  // solution in the instance's x-space
  Eigen::VectorXd final_sparse;  // the iterate whose zeros are counted
};

SolverRunOutput run_solver(const std::string& solver, const GenLassoInstance& inst,
                           const ExperimentConfig& cfg);

// Runs every configured solver and writes CSVs; returns the written paths.
std::vector<std::string> cmd_run(const ExperimentConfig& cfg);

struct CompareRow {
  std::string solver;
  long final_nnz = 0;
  double final_objective = 0.0;
  double relative_mse = 0.0;  // ||x - x0||^2 / ||x0||^2
  double rc_final = 0.0;
  double regret_slope = 0.0;  // log-log slope fit of the running R1
};

std::vector<CompareRow> compare_solvers(const ExperimentConfig& cfg);
// Prints the table and writes <out_dir>/compare.csv.
void cmd_compare(const ExperimentConfig& cfg);

// Grid search rho over {0.01, 0.1, 1, 10, 100} by held-out squared error.
struct TuneResult {
  double best_rho = 1.0;
  std::vector<std::pair<double, double>> grid;  // (rho, holdout error)
};
TuneResult cmd_tune_rho(const ExperimentConfig& cfg, double holdout_fraction = 0.2);

}  // namespace oadm::bench
