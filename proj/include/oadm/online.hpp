#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "oadm/batch.hpp"
#include "oadm/constraint.hpp"
#include "oadm/loss.hpp"

namespace oadm {

enum class TheoremId { T1, T2, T3, T4, T5, T6 };

// Per-round learning rate eta_t and penalty rho_t. The named constructors
// realize the schedules under which the regret bounds are certified:
//   sqrt-horizon: eta = G_f sqrt(T) / (D_x sqrt(2 alpha)),  rho = sqrt(T)
//   linear-t:     eta_t = beta1 t,  rho_t = beta2 t / lambda_max(B^T B)
// and their eta = 0 counterparts for the feasible-companion scenario.
struct StepSchedule {
  enum class Kind { Constant, SqrtHorizon, LinearT, Custom };

  Kind kind = Kind::Constant;
  std::function<double(long)> eta_fn;
  std::function<double(long)> rho_fn;
  std::optional<TheoremId> theorem;
  long t_horizon = -1;

  double eta(long t) const { return eta_fn ? eta_fn(t) : 0.0; }
  double rho(long t) const { return rho_fn ? rho_fn(t) : 0.0; }

  static StepSchedule constant(double eta, double rho);
  static StepSchedule sqrt_horizon(double g_f, double d_x, double alpha, long t_horizon);
  static StepSchedule linear_t(double beta1, double beta2, double lambda_max_btb);
  static StepSchedule sqrt_horizon_feasible(double g_f, double d_z,
                                            double lambda_min_aat,
                                            double lambda_max_btb, long t_horizon);
  static StepSchedule linear_t_feasible(double beta2, double lambda_max_btb);
  static StepSchedule custom(std::function<double(long)> eta_fn,
                             std::function<double(long)> rho_fn);
};

enum class Scenario {
  Regularized,        // play (x_t, z_t); eta >= 0
  FeasibleCompanion,  // play (x_hat_t, z_t) with A x_hat_t + B z_t = c; eta = 0
};

struct OadmConfig {
  Scenario scenario = Scenario::Regularized;
  bool exact_x_update = true;  // full subproblem vs linearized gradient step
  StepSchedule schedule;
  AssumptionBundle assumptions;
  // Evaluate loss subgradients at played and updated points to verify the
  // assumed bound G_f. Diagnostic only; turn off for timing runs.
  bool track_gradients = true;
};

struct RoundOutput {
  Eigen::VectorXd x_next;
  Eigen::VectorXd z_next;
  Eigen::VectorXd y_next;
  std::optional<Eigen::VectorXd> x_hat;
  ResidualRecord residual;
};

// One pass of the three online updates with the proximal term
// (eta/2)||x - x_t||^2 added to the x-subproblem.
RoundOutput oadm_step_exact(const SolverState& state, const LossTerm& f_t,
                            const Regularizer& g, const ConstraintSpec& cons,
                            double eta, double rho);

// Linearized x-update (gradient step on both the loss and the quadratic
// coupling, anchored at x_t): requires eta > 0.
//   x_{t+1} = x_t - (1/eta) [ f'_t(x_t) + A^T (y_t + rho (A x_t + B z_t - c)) ]
RoundOutput oadm_step_linearized(const SolverState& state, const LossTerm& f_t,
                                 const Regularizer& g, const ConstraintSpec& cons,
                                 double eta, double rho);

// Solves A x_hat = c - B z; O(n) for the structured invertible kinds.
Eigen::VectorXd feasible_companion(const Eigen::VectorXd& z, const ConstraintSpec& cons);

// Everything the regret ledger needs about update index t: the losses of the
// played point (revealed-then-scored semantics) and the post-update
// residuals entering the constraint-violation regret.
struct RoundRecord {
  long t = 0;
  double loss_x = 0.0;     // f_t(x_t)
  double loss_g = 0.0;     // g(z_t)
  double loss_xhat = 0.0;  // f_t(x_hat_t); NaN outside the companion scenario
  double primal_sq = 0.0;  // ||A x_{t+1} + B z_{t+1} - c||^2
  double dual_sq = 0.0;    // ||B z_{t+1} - B z_t||^2
  double post_loss = 0.0;  // f_t(x_{t+1}) + g(z_{t+1})
  double play_violation = 0.0;   // ||A x_t + B z_t - c||
  double boyd_dual = 0.0;        // rho_t ||A^T B (z_{t+1} - z_t)||
  double eta_t = 0.0;
  double rho_t = 0.0;
};

// Optional per-round observer; invoked after each update with the record and
// the new state.
using RoundObserver = std::function<void(const RoundRecord&, const SolverState&)>;

struct OnlineRunResult {
  SolverState final_state;
  std::vector<RoundRecord> records;  // one per update index 0..T
  long x_solve_count = 0;
  long z_prox_count = 0;
  long dual_update_count = 0;
  double max_companion_residual = 0.0;  // max_t ||A x_hat_t + B z_t - c||
  double max_grad_norm = 0.0;           // sup of ||f'_t|| at played and updated points
};

// Runs update rounds t = 0..T from the zero state: plays (x_t, z_t) (or
// (x_hat_t, z_t)), reveals f_t, applies the configured single-pass update.
OnlineRunResult run_online(const LossStream& stream, const Regularizer& g,
                           const ConstraintSpec& cons, const OadmConfig& config,
                           long t_horizon, const RoundObserver& observer = nullptr);

}  // namespace oadm
