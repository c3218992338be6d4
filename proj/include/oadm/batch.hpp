#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "oadm/constraint.hpp"
#include "oadm/loss.hpp"

namespace oadm {

// Primal pair (x, z) and dual y after t update steps. Runs start from the
// all-zeros state.
struct SolverState {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd y;
  long t = 0;

  Eigen::VectorXd scaled_dual(double rho) const { return y / rho; }
};

SolverState make_initial_state(const ConstraintSpec& cons);

struct ResidualRecord {
  double primal = 0.0;          // ||A x_{t+1} + B z_{t+1} - c||
  double dual_surrogate = 0.0;  // ||B z_{t+1} - B z_t||
  double objective = 0.0;       // f(x_{t+1}) + g(z_{t+1})
};

struct StopCriteria {
  double eps_abs = 1e-4;
  double eps_rel = 1e-3;
  long max_iters = 10000;
};

struct TrajectoryPoint {
  long iter = 0;
  double objective = 0.0;
  double primal_residual = 0.0;  // ||A x + B z - c||
  double dual_residual = 0.0;    // rho ||A^T B (z_{t+1} - z_t)||
  double dual_surrogate = 0.0;   // ||B (z_{t+1} - z_t)||
};

struct AdmmStepResult {
  SolverState state;
  ResidualRecord residual;
};

// One pass of the three alternating updates at penalty rho.
AdmmStepResult admm_step(const SolverState& state, const LossTerm& f,
                         const Regularizer& g, const ConstraintSpec& cons,
                         double rho);

struct BatchRunOptions {
  StopCriteria stop;
  bool store_states = false;                 // keep every post-update state
  std::optional<SolverState> initial_state;  // defaults to zeros
};

struct BatchRunResult {
  SolverState final_state;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<SolverState> states;  // states[0] is the initial state
  bool converged = false;
  long iterations = 0;
};

// Iterates admm_step until the combined primal/dual stopping criterion
//   ||A x + B z - c||        <= sqrt(m)  eps_abs + eps_rel max(||Ax||,||Bz||,||c||)
//   rho ||A^T B (z' - z)||   <= sqrt(n1) eps_abs + eps_rel ||A^T y||
// holds, or max_iters is reached.
BatchRunResult run_batch(const LossTerm& f, const Regularizer& g,
                         const ConstraintSpec& cons, double rho,
                         const BatchRunOptions& opts = {});

void export_trajectory_csv(std::span<const TrajectoryPoint> trajectory,
                           const std::string& path);

// Certified instances of the constant bounds on the cumulative objective gap
// and the cumulative squared residuals of a zero-started batch run.
struct Theorem1Certificate {
  double objective_lhs = 0.0;  // sum_t [f(x_{t+1}) + g(z_{t+1})] - (T+1) (f(x*) + g(z*))
  double objective_rhs = 0.0;  // lambda_max(B^T B) ||z*||^2 rho / 2
  double residual_lhs = 0.0;   // sum_t ||Ax+Bz-c||^2 + ||B dz||^2
  double residual_rhs = 0.0;   // lambda_max(B^T B) ||z*||^2 + ||y*||^2 / rho^2
  bool objective_ok = false;
  bool residual_ok = false;
};

// Requires a feasible comparator (x*, z*); y* from a high-accuracy run.
Theorem1Certificate theorem1_certificate(std::span<const TrajectoryPoint> trajectory,
                                         const LossTerm& f, const Regularizer& g,
                                         const ConstraintSpec& cons,
                                         const Eigen::VectorXd& x_star,
                                         const Eigen::VectorXd& z_star,
                                         const Eigen::VectorXd& y_star, double rho);

// Ergodic-accuracy report: the averaged iterate over the first T updates,
// the merit gap at a probe w = (x, z, y),
//   gap(w) = h(w_bar) - h(w) + (w_bar - w)^T F(w_bar),
// and the probe-dependent constant
//   L(w) = (rho/2) ||A x - c||^2 + (1/(2 rho)) ||y||^2,
// whose ratio L(w)/T dominates the gap for zero-started runs.
struct ViGapReport {
  Eigen::VectorXd x_bar;
  Eigen::VectorXd z_bar;
  Eigen::VectorXd y_bar;
  double gap = 0.0;
  double bound_l = 0.0;
  double bound_over_t = 0.0;
};

// states must hold the initial state at index 0 and post-update states
// after it; the average runs over states[1..T].
ViGapReport vi_gap(std::span<const SolverState> states, long t_horizon,
                   const LossTerm& f, const Regularizer& g,
                   const ConstraintSpec& cons, const Eigen::VectorXd& probe_x,
                   const Eigen::VectorXd& probe_z, const Eigen::VectorXd& probe_y,
                   double rho);

}  // namespace oadm
