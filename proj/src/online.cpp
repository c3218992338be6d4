#include "oadm/online.hpp"

#include <cmath>
#include <limits>

#include "oadm/error.hpp"
#include "oadm/updates.hpp"

namespace oadm {

StepSchedule StepSchedule::constant(double eta, double rho) {
  if (eta < 0.0 || !(rho > 0.0)) {
    throw ParameterError("StepSchedule::constant: need eta >= 0 and rho > 0");
  }
  StepSchedule s;
  s.kind = Kind::Constant;
  s.eta_fn = [eta](long) { return eta; };
  s.rho_fn = [rho](long) { return rho; };
  return s;
}

StepSchedule StepSchedule::sqrt_horizon(double g_f, double d_x, double alpha,
                                        long t_horizon) {
  if (!(g_f > 0.0) || !(d_x > 0.0) || !(alpha > 0.0) || t_horizon < 1) {
    throw ParameterError("StepSchedule::sqrt_horizon: bad parameters");
  }
  const double sqrt_t = std::sqrt(static_cast<double>(t_horizon));
  const double eta = g_f * sqrt_t / (d_x * std::sqrt(2.0 * alpha));
  StepSchedule s;
  s.kind = Kind::SqrtHorizon;
  s.eta_fn = [eta](long) { return eta; };
  s.rho_fn = [sqrt_t](long) { return sqrt_t; };
  s.theorem = TheoremId::T3;
  s.t_horizon = t_horizon;
  return s;
}

StepSchedule StepSchedule::linear_t(double beta1, double beta2,
                                    double lambda_max_btb) {
  if (!(beta1 > 0.0) || !(beta2 > 0.0) || !(lambda_max_btb > 0.0)) {
    throw ParameterError("StepSchedule::linear_t: bad parameters");
  }
  StepSchedule s;
  s.kind = Kind::LinearT;
  s.eta_fn = [beta1](long t) { return beta1 * static_cast<double>(t); };
  s.rho_fn = [beta2, lambda_max_btb](long t) {
    return beta2 * static_cast<double>(t) / lambda_max_btb;
  };
  s.theorem = TheoremId::T4;
  return s;
}

StepSchedule StepSchedule::sqrt_horizon_feasible(double g_f, double d_z,
                                                 double lambda_min_aat,
                                                 double lambda_max_btb,
                                                 long t_horizon) {
  if (!(g_f > 0.0) || !(d_z > 0.0) || !(lambda_min_aat > 0.0) ||
      !(lambda_max_btb > 0.0) || t_horizon < 1) {
    throw ParameterError("StepSchedule::sqrt_horizon_feasible: bad parameters");
  }
  const double rho = g_f * std::sqrt(static_cast<double>(t_horizon)) /
                     (d_z * std::sqrt(lambda_min_aat * lambda_max_btb));
  StepSchedule s;
  s.kind = Kind::SqrtHorizon;
  s.eta_fn = [](long) { return 0.0; };
  s.rho_fn = [rho](long) { return rho; };
  s.theorem = TheoremId::T5;
  s.t_horizon = t_horizon;
  return s;
}

StepSchedule StepSchedule::linear_t_feasible(double beta2, double lambda_max_btb) {
  if (!(beta2 > 0.0) || !(lambda_max_btb > 0.0)) {
    throw ParameterError("StepSchedule::linear_t_feasible: bad parameters");
  }
  StepSchedule s;
  s.kind = Kind::LinearT;
  s.eta_fn = [](long) { return 0.0; };
  s.rho_fn = [beta2, lambda_max_btb](long t) {
    return beta2 * static_cast<double>(t) / lambda_max_btb;
  };
  s.theorem = TheoremId::T6;
  return s;
}

StepSchedule StepSchedule::custom(std::function<double(long)> eta_fn,
                                  std::function<double(long)> rho_fn) {
  StepSchedule s;
  s.kind = Kind::Custom;
  s.eta_fn = std::move(eta_fn);
  s.rho_fn = std::move(rho_fn);
  return s;
}

namespace {

RoundOutput package_round(SinglePassResult pass) {
  RoundOutput out;
  out.x_next = std::move(pass.x);
  out.z_next = std::move(pass.z);
  out.y_next = std::move(pass.y);
  out.residual.primal = pass.primal_norm;
  out.residual.dual_surrogate = pass.dual_surrogate_norm;
  out.residual.objective = pass.objective;
  return out;
}

}  // namespace

RoundOutput oadm_step_exact(const SolverState& state, const LossTerm& f_t,
                            const Regularizer& g, const ConstraintSpec& cons,
                            double eta, double rho) {
  if (eta < 0.0 || rho < 0.0) {
    throw ParameterError("oadm_step_exact: eta and rho must be >= 0");
  }
  return package_round(
      single_pass_update(state.x, state.z, state.y, f_t, g, cons, eta, rho, true));
}

RoundOutput oadm_step_linearized(const SolverState& state, const LossTerm& f_t,
                                 const Regularizer& g, const ConstraintSpec& cons,
                                 double eta, double rho) {
  if (!(eta > 0.0)) {
    throw ParameterError("oadm_step_linearized: eta must be > 0");
  }
  return package_round(
      single_pass_update(state.x, state.z, state.y, f_t, g, cons, eta, rho, false));
}

Eigen::VectorXd feasible_companion(const Eigen::VectorXd& z,
                                   const ConstraintSpec& cons) {
  if (!cons.a().invertible()) {
    throw CapabilityError("feasible_companion: A is not declared invertible");
  }
  return cons.a().solve(cons.c() - cons.b().apply(z));
}

OnlineRunResult run_online(const LossStream& stream, const Regularizer& g,
                           const ConstraintSpec& cons, const OadmConfig& config,
                           long t_horizon, const RoundObserver& observer) {
  if (t_horizon < 1) throw ParameterError("run_online: horizon must be >= 1");
  if (config.scenario == Scenario::FeasibleCompanion && !cons.a().invertible()) {
    throw CapabilityError("run_online: the companion scenario needs invertible A");
  }
  OnlineRunResult result;
  result.records.reserve(t_horizon + 1);
  SolverState state = make_initial_state(cons);
  XUpdateCache x_cache;
  ZUpdateCache z_cache;
  Eigen::VectorXd b_z = cons.b().apply(state.z);
  for (long t = 0; t <= t_horizon; ++t) {
    const LossTerm f = stream.term(t);
    const double eta = config.schedule.eta(t);
    const double rho = config.schedule.rho(t);
    RoundRecord rec;
    rec.t = t;
    rec.eta_t = eta;
    rec.rho_t = rho;
    // Score the played point before updating.
    rec.loss_x = f.value(state.x);
    rec.loss_g = g.value(state.z);
    rec.play_violation = cons.a().is_identity()
                             ? (state.x + b_z - cons.c()).norm()
                             : (cons.a().apply(state.x) + b_z - cons.c()).norm();
    rec.loss_xhat = std::numeric_limits<double>::quiet_NaN();
    if (config.scenario == Scenario::FeasibleCompanion) {
      const Eigen::VectorXd x_hat = feasible_companion(state.z, cons);
      rec.loss_xhat = f.value(x_hat);
      const double companion_residual =
          (cons.a().apply(x_hat) + b_z - cons.c()).norm();
      result.max_companion_residual =
          std::max(result.max_companion_residual, companion_residual);
      if (config.track_gradients) {
        result.max_grad_norm =
            std::max(result.max_grad_norm, f.subgradient(x_hat).norm());
      }
    }
    if (config.track_gradients) {
      result.max_grad_norm =
          std::max(result.max_grad_norm, f.subgradient(state.x).norm());
    }

    SinglePassResult pass =
        single_pass_update(state.x, state.z, state.y, f, g, cons, eta, rho,
                           config.exact_x_update, &b_z, &x_cache, &z_cache);
    ++result.x_solve_count;
    ++result.z_prox_count;
    ++result.dual_update_count;
    rec.primal_sq = pass.primal_norm * pass.primal_norm;
    rec.dual_sq = pass.dual_surrogate_norm * pass.dual_surrogate_norm;
    rec.post_loss = pass.objective;
    rec.boyd_dual = cons.a().is_identity()
                        ? rho * pass.dual_surrogate_norm
                        : rho * cons.a().apply_transpose(pass.b_z - b_z).norm();
    if (config.track_gradients) {
      result.max_grad_norm =
          std::max(result.max_grad_norm, f.subgradient(pass.x).norm());
    }

    state.x = std::move(pass.x);
    state.z = std::move(pass.z);
    state.y = std::move(pass.y);
    state.t = t + 1;
    b_z = std::move(pass.b_z);
    result.records.push_back(rec);
    if (observer) observer(rec, state);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace oadm
