#include "bench_lib.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>

#include "oadm/baselines.hpp"
#include "oadm/batch.hpp"
#include "oadm/error.hpp"
#include "oadm/online.hpp"

namespace oadm::bench {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_rows(std::ostream& out, const std::vector<MetricRow>& rows) {
  for (const MetricRow& r : rows) {
    out << r.t << ',' << r.solver << ',' << g17(r.objective) << ',' << r.nnz << ','
        << g17(r.primal_residual) << ',' << g17(r.dual_residual) << ','
        << g17(r.r1_running) << ',' << g17(r.r2_running) << ','
        << g17(r.rc_running) << ',' << g17(r.eta_t) << ',' << g17(r.rho_t) << '\n';
  }
}

constexpr const char* kHeader =
    "t,solver,objective,nnz,primal_residual,dual_residual,R1_running,"
    "R2_running,Rc_running,eta_t,rho_t\n";

// Large enough tau keeps the forward step of every row-loss contractive.
double auto_fobos_rho(const GenLassoInstance& inst, long t_horizon) {
  double l_max = 0.0;
  for (long i = 0; i < inst.N; ++i) {
    l_max = std::max(l_max, 2.0 * inst.data.row(i).squaredNorm());
  }
  return 2.0 * l_max * std::sqrt(static_cast<double>(t_horizon + 1));
}

double slope_fit(const std::vector<std::pair<double, double>>& log_points) {
  if (log_points.size() < 3) return kNan;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : log_points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(log_points.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return kNan;
  return (n * sxy - sx * sy) / denom;
}

std::set<long> geometric_grid(long t_max, int points) {
  std::set<long> grid;
  for (int j = 1; j <= points; ++j) {
    const double f = static_cast<double>(j) / points;
    grid.insert(std::max<long>(1, static_cast<long>(
                                      std::llround(std::pow(t_max, f)))));
  }
  grid.insert(t_max);
  return grid;
}

}  // namespace

long count_nonzeros(const Eigen::VectorXd& v) {
  long nnz = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kNnzThreshold) ++nnz;
  }
  return nnz;
}

void cmd_gen(const DataGenConfig& cfg, const std::string& out_path) {
  save_instance(generate(cfg), out_path);
}

namespace {

SolverRunOutput run_oadm(const GenLassoInstance& inst, const ExperimentConfig& cfg) {
  const long t_horizon = cfg.passes * inst.N - 1;
  const ConstraintSpec cons = inst.constraint();
  const Regularizer g = inst.regularizer();
  const CyclicLossStream stream(inst);

  OadmConfig config;
  const double eta0 = cfg.eta;
  if (cfg.eta_kind == "linear") {
    config.schedule = StepSchedule::custom(
        [eta0](long t) { return eta0 * static_cast<double>(t); },
        [rho = cfg.rho](long) { return rho; });
  } else if (cfg.eta_kind == "constant") {
    config.schedule = StepSchedule::custom([eta0](long) { return eta0; },
                                           [rho = cfg.rho](long) { return rho; });
  } else {
    throw ConfigError("unknown eta kind: " + cfg.eta_kind);
  }
  config.scenario = (cfg.eta == 0.0 && cons.a().invertible())
                        ? Scenario::FeasibleCompanion
                        : Scenario::Regularized;

  std::vector<double> comp_losses;
  double comp_value = 0.0;
  if (cfg.with_regret) {
    const ComparatorResult comp = comparator(stream, t_horizon, g, cons);
    comp_value = comp.value;
    comp_losses = per_round_comparator_losses(stream, g, comp.x, comp.z, t_horizon);
  }
  (void)comp_value;

  SolverRunOutput out;
  out.solver = "oadm";
  double played_sum = 0.0;
  double companion_sum = 0.0;
  double rc_sum = 0.0;
  double comp_sum = 0.0;
  const RoundObserver observer = [&](const RoundRecord& rec, const SolverState& state) {
    played_sum += rec.loss_x + rec.loss_g;
    companion_sum += rec.loss_xhat + rec.loss_g;
    if (rec.t >= 1) rc_sum += rec.primal_sq + rec.dual_sq;
    if (cfg.with_regret) comp_sum += comp_losses[rec.t];
    if (rec.t % cfg.stride != 0 && rec.t != t_horizon) return;
    MetricRow row;
    row.t = rec.t;
    row.solver = "oadm";
    row.objective = inst.objective(state.x);
    row.nnz = count_nonzeros(state.z);
    row.primal_residual = std::sqrt(rec.primal_sq);
    row.dual_residual = rec.boyd_dual;
    row.r1_running = cfg.with_regret ? played_sum - comp_sum : kNan;
    row.r2_running = cfg.with_regret && !std::isnan(rec.loss_xhat)
                         ? companion_sum - comp_sum
                         : kNan;
    row.rc_running = rc_sum;
    row.eta_t = rec.eta_t;
    row.rho_t = rec.rho_t;
    out.rows.push_back(row);
  };
  OnlineRunResult run = run_online(stream, g, cons, config, t_horizon, observer);
  out.final_signal = run.final_state.x;
  out.final_sparse = run.final_state.z;
  return out;
}

SolverRunOutput run_admm(const GenLassoInstance& inst, const ExperimentConfig& cfg) {
  const ConstraintSpec cons = inst.constraint();
  BatchRunOptions opts;
  opts.stop.max_iters = cfg.passes;
  opts.store_states = true;
  BatchRunResult run =
      run_batch(inst.batch_loss(), inst.regularizer(), cons, cfg.rho, opts);
  SolverRunOutput out;
  out.solver = "admm";
  for (std::size_t k = 0; k < run.trajectory.size(); ++k) {
    const TrajectoryPoint& p = run.trajectory[k];
    if ((p.iter - 1) % cfg.stride != 0 && p.iter != run.iterations) continue;
    MetricRow row;
    row.t = p.iter - 1;
    row.solver = "admm";
    row.objective = inst.objective(run.states[p.iter].x);
    row.nnz = count_nonzeros(run.states[p.iter].z);
    row.primal_residual = p.primal_residual;
    row.dual_residual = p.dual_residual;
    row.r1_running = kNan;
    row.r2_running = kNan;
    row.rc_running = kNan;
    row.eta_t = kNan;
    row.rho_t = cfg.rho;
    out.rows.push_back(row);
  }
  out.final_signal = run.final_state.x;
  out.final_sparse = run.final_state.z;
  return out;
}

SolverRunOutput run_forward_baseline(const std::string& solver,
                                     const GenLassoInstance& inst,
                                     const ExperimentConfig& cfg) {
  const bool tv = inst.kind == ProblemKind::TotalVariation;
  const GenLassoInstance working = tv ? reformulate_tv_as_lasso(inst) : inst;
  const long t_horizon = cfg.passes * inst.N - 1;
  const long rounds = t_horizon + 1;
  const CyclicLossStream stream(working);
  const Regularizer g = working.regularizer();

  std::vector<double> comp_losses;
  if (cfg.with_regret) {
    const ConstraintSpec cons = ConstraintSpec::splitting(working.n);
    const ComparatorResult comp = comparator(stream, t_horizon, g, cons);
    comp_losses = per_round_comparator_losses(stream, g, comp.x, comp.z, t_horizon);
  }

  SolverRunOutput out;
  out.solver = solver;
  double played_sum = 0.0;
  double rc_sum = 0.0;
  double comp_sum = 0.0;
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(working.n);
  double current_knob = kNan;
  const BaselineObserver observer = [&](long t, const Eigen::VectorXd& play,
                                        const Eigen::VectorXd& next) {
    played_sum += stream.term(t).value(play) + g.value(play);
    if (t >= 1) rc_sum += (next - prev).squaredNorm();
    prev = next;
    if (cfg.with_regret) comp_sum += comp_losses[t];
    if (t % cfg.stride != 0 && t != t_horizon) return;
    MetricRow row;
    row.t = t;
    row.solver = solver;
    const Eigen::VectorXd x_space = tv ? recover_tv_signal(next) : next;
    row.objective = inst.objective(x_space);
    row.nnz = count_nonzeros(next);
    row.primal_residual = 0.0;
    row.dual_residual = (next - play).norm();
    row.r1_running = cfg.with_regret ? played_sum - comp_sum : kNan;
    row.r2_running = row.r1_running;  // plays are feasible pairs
    row.rc_running = rc_sum;
    row.eta_t = kNan;
    row.rho_t = current_knob;
    out.rows.push_back(row);
  };

  Eigen::VectorXd final_v;
  if (solver == "fobos") {
    const double base = cfg.fobos_rho > 0.0 ? cfg.fobos_rho
                                            : auto_fobos_rho(working, t_horizon);
    std::function<double(long)> tau_of;
    if (cfg.fobos_fixed_tau) {
      tau_of = [base](long) { return base; };
    } else {
      tau_of = [base](long t) {
        return base / std::sqrt(static_cast<double>(t + 1));
      };
    }
    const BaselineObserver wrapped = [&](long t, const Eigen::VectorXd& play,
                                         const Eigen::VectorXd& next) {
      current_knob = tau_of(t);
      observer(t, play, next);
    };
    final_v = run_fobos(stream, g, tau_of, rounds, wrapped);
  } else {
    RdaConfig rda;
    rda.gamma = cfg.gamma;
    rda.lambda = working.lambda;
    current_knob = cfg.gamma;
    final_v = run_rda(stream, rda, rounds, observer);
  }
  out.final_sparse = final_v;
  out.final_signal = tv ? recover_tv_signal(final_v) : final_v;
  return out;
}

}  // namespace

SolverRunOutput run_solver(const std::string& solver, const GenLassoInstance& inst,
                           const ExperimentConfig& cfg) {
  if (cfg.passes < 1) throw ConfigError("passes must be >= 1");
  if (cfg.stride < 1) throw ConfigError("stride must be >= 1");
  if (solver == "oadm") return run_oadm(inst, cfg);
  if (solver == "admm") return run_admm(inst, cfg);
  if (solver == "fobos" || solver == "rda") {
    return run_forward_baseline(solver, inst, cfg);
  }
  throw ConfigError("unknown solver: " + solver);
}

std::vector<std::string> cmd_run(const ExperimentConfig& cfg) {
  const GenLassoInstance inst = load_instance(cfg.instance_path);
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::string> written;
  std::ofstream combined;
  if (!cfg.split_files) {
    const std::string path = cfg.out_dir + "/run.csv";
    combined.open(path);
    if (!combined) throw IoError("cmd_run: cannot open " + path);
    combined << kHeader;
    written.push_back(path);
  }
  for (const std::string& solver : cfg.solvers) {
    const SolverRunOutput out = run_solver(solver, inst, cfg);
    if (cfg.split_files) {
      const std::string path = cfg.out_dir + "/" + solver + ".csv";
      std::ofstream f(path);
      if (!f) throw IoError("cmd_run: cannot open " + path);
      f << kHeader;
      write_rows(f, out.rows);
      if (!f) throw IoError("cmd_run: write failed for " + path);
      written.push_back(path);
    } else {
      write_rows(combined, out.rows);
    }
  }
  if (!cfg.split_files && !combined) {
    throw IoError("cmd_run: write failed");
  }
  return written;
}

std::vector<CompareRow> compare_solvers(const ExperimentConfig& cfg) {
  const GenLassoInstance inst = load_instance(cfg.instance_path);
  std::vector<CompareRow> table;
  for (const std::string& solver : cfg.solvers) {
    const SolverRunOutput out = run_solver(solver, inst, cfg);
    CompareRow row;
    row.solver = solver;
    row.final_nnz = count_nonzeros(out.final_sparse);
    row.final_objective = inst.objective(out.final_signal);
    const double denom = inst.ground_truth.squaredNorm();
    row.relative_mse = denom > 0.0
                           ? (out.final_signal - inst.ground_truth).squaredNorm() / denom
                           : kNan;
    row.rc_final = out.rows.empty() ? kNan : out.rows.back().rc_running;
    std::vector<std::pair<double, double>> pts;
    for (const MetricRow& r : out.rows) {
      if (r.t >= 1 && std::isfinite(r.r1_running) && r.r1_running > 0.0) {
        pts.emplace_back(std::log(static_cast<double>(r.t)), std::log(r.r1_running));
      }
    }
    // thin to a geometric grid so early rounds do not dominate the fit
    std::vector<std::pair<double, double>> thin;
    if (!pts.empty()) {
      const std::set<long> grid = geometric_grid(out.rows.back().t, 24);
      std::size_t j = 0;
      for (long t : grid) {
        const double lt = std::log(static_cast<double>(t));
        while (j + 1 < pts.size() && pts[j].first < lt) ++j;
        if (std::abs(pts[j].first - lt) < 1e-9) thin.push_back(pts[j]);
      }
    }
    row.regret_slope = slope_fit(thin);
    table.push_back(row);
  }
  return table;
}

void cmd_compare(const ExperimentConfig& cfg) {
  const std::vector<CompareRow> table = compare_solvers(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/compare.csv";
  std::ofstream f(path);
  if (!f) throw IoError("cmd_compare: cannot open " + path);
  f << "solver,final_nnz,final_objective,relative_mse,Rc_final,regret_slope\n";
  std::printf("%-8s %10s %16s %14s %14s %12s\n", "solver", "nnz", "objective",
              "rel_mse", "Rc", "slope");
  for (const CompareRow& r : table) {
    f << r.solver << ',' << r.final_nnz << ',' << g17(r.final_objective) << ','
      << g17(r.relative_mse) << ',' << g17(r.rc_final) << ','
      << g17(r.regret_slope) << '\n';
    std::printf("%-8s %10ld %16.8g %14.6g %14.6g %12.4g\n", r.solver.c_str(),
                r.final_nnz, r.final_objective, r.relative_mse, r.rc_final,
                r.regret_slope);
  }
  if (!f) throw IoError("cmd_compare: write failed for " + path);
}

TuneResult cmd_tune_rho(const ExperimentConfig& cfg, double holdout_fraction) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("tune-rho: holdout fraction must be in (0, 1)");
  }
  const GenLassoInstance inst = load_instance(cfg.instance_path);
  const long n_holdout =
      std::max<long>(1, static_cast<long>(std::ceil(holdout_fraction * inst.N)));
  const long n_train = inst.N - n_holdout;
  if (n_train < 1) throw ConfigError("tune-rho: not enough rows to split");

  GenLassoInstance train = inst;
  train.N = n_train;
  train.data = inst.data.topRows(n_train);
  train.targets = inst.targets.head(n_train);

  const RowMatrixXd holdout_rows = inst.data.bottomRows(n_holdout);
  const Eigen::VectorXd holdout_targets = inst.targets.tail(n_holdout);

  TuneResult result;
  double best_err = std::numeric_limits<double>::infinity();
  const std::string solver = cfg.solvers.empty() ? "oadm" : cfg.solvers.front();
  for (double rho : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    ExperimentConfig trial = cfg;
    trial.rho = rho;
    trial.with_regret = false;
    trial.stride = std::max<long>(trial.stride, 1000000);  // metrics not needed
    const SolverRunOutput out = run_solver(solver, train, trial);
    const double err = (holdout_rows * out.final_signal - holdout_targets)
                           .squaredNorm() /
                       static_cast<double>(n_holdout);
    result.grid.emplace_back(rho, err);
    if (err < best_err) {
      best_err = err;
      result.best_rho = rho;
    }
  }
  return result;
}

}  // namespace oadm::bench
