#include "oadm/batch.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oadm/error.hpp"
#include "oadm/updates.hpp"

namespace oadm {

SolverState make_initial_state(const ConstraintSpec& cons) {
  SolverState s;
  s.x = Eigen::VectorXd::Zero(cons.n1());
  s.z = Eigen::VectorXd::Zero(cons.n2());
  s.y = Eigen::VectorXd::Zero(cons.m());
  s.t = 0;
  return s;
}

AdmmStepResult admm_step(const SolverState& state, const LossTerm& f,
                         const Regularizer& g, const ConstraintSpec& cons,
                         double rho) {
  if (!(rho > 0.0)) throw ParameterError("admm_step: rho must be > 0");
  SinglePassResult pass =
      single_pass_update(state.x, state.z, state.y, f, g, cons, 0.0, rho, true);
  AdmmStepResult out;
  out.state.x = std::move(pass.x);
  out.state.z = std::move(pass.z);
  out.state.y = std::move(pass.y);
  out.state.t = state.t + 1;
  out.residual.primal = pass.primal_norm;
  out.residual.dual_surrogate = pass.dual_surrogate_norm;
  out.residual.objective = pass.objective;
  return out;
}

BatchRunResult run_batch(const LossTerm& f, const Regularizer& g,
                         const ConstraintSpec& cons, double rho,
                         const BatchRunOptions& opts) {
  if (!(rho > 0.0)) throw ParameterError("run_batch: rho must be > 0");
  if (opts.stop.max_iters < 1) throw ParameterError("run_batch: max_iters must be >= 1");
  BatchRunResult result;
  SolverState state = opts.initial_state ? *opts.initial_state
                                         : make_initial_state(cons);
  XUpdateCache x_cache;
  ZUpdateCache z_cache;
  const double sqrt_m = std::sqrt(static_cast<double>(cons.m()));
  const double sqrt_n1 = std::sqrt(static_cast<double>(cons.n1()));
  result.trajectory.reserve(std::min<long>(opts.stop.max_iters, 1 << 20));
  if (opts.store_states) result.states.push_back(state);
  Eigen::VectorXd b_z = cons.b().apply(state.z);
  for (long k = 1; k <= opts.stop.max_iters; ++k) {
    SinglePassResult pass =
        single_pass_update(state.x, state.z, state.y, f, g, cons, 0.0, rho, true,
                           &b_z, &x_cache, &z_cache);
    const double dual_residual =
        rho * cons.a().apply_transpose(pass.b_z - b_z).norm();
    TrajectoryPoint point{k, pass.objective, pass.primal_norm, dual_residual,
                          pass.dual_surrogate_norm};
    result.trajectory.push_back(point);
    state.x = std::move(pass.x);
    state.z = std::move(pass.z);
    state.y = std::move(pass.y);
    state.t += 1;
    b_z = std::move(pass.b_z);
    if (opts.store_states) result.states.push_back(state);
    const double eps_pri =
        sqrt_m * opts.stop.eps_abs +
        opts.stop.eps_rel * std::max({cons.a().apply(state.x).norm(), b_z.norm(),
                                      cons.c().norm()});
    const double eps_dual = sqrt_n1 * opts.stop.eps_abs +
                            opts.stop.eps_rel *
                                cons.a().apply_transpose(state.y).norm();
    result.iterations = k;
    if (point.primal_residual <= eps_pri && point.dual_residual <= eps_dual) {
      result.converged = true;
      break;
    }
  }
  result.final_state = std::move(state);
  return result;
}

void export_trajectory_csv(std::span<const TrajectoryPoint> trajectory,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("export_trajectory_csv: cannot open " + path);
  out << "iter,objective,primal_residual,dual_residual\n";
  char buf[160];
  for (const TrajectoryPoint& p : trajectory) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g\n", p.iter, p.objective,
                  p.primal_residual, p.dual_residual);
    out << buf;
  }
  if (!out) throw IoError("export_trajectory_csv: write failed for " + path);
}

Theorem1Certificate theorem1_certificate(std::span<const TrajectoryPoint> trajectory,
                                         const LossTerm& f, const Regularizer& g,
                                         const ConstraintSpec& cons,
                                         const Eigen::VectorXd& x_star,
                                         const Eigen::VectorXd& z_star,
                                         const Eigen::VectorXd& y_star, double rho) {
  const Eigen::VectorXd r_star = cons.residual(x_star, z_star);
  if (r_star.norm() > 1e-6 * (1.0 + cons.c().norm())) {
    throw ParameterError("theorem1_certificate: comparator is not feasible");
  }
  const double opt_value = f.value(x_star) + g.value(z_star);
  const double lambda_max = cons.spectral().lambda_max_BtB;
  const double dz2 = z_star.squaredNorm();
  const double dy2 = y_star.squaredNorm();
  Theorem1Certificate cert;
  for (const TrajectoryPoint& p : trajectory) {
    cert.objective_lhs += p.objective - opt_value;
    cert.residual_lhs += p.primal_residual * p.primal_residual +
                         p.dual_surrogate * p.dual_surrogate;
  }
  cert.objective_rhs = lambda_max * dz2 * rho / 2.0;
  cert.residual_rhs = lambda_max * dz2 + dy2 / (rho * rho);
  const auto ok = [](double lhs, double rhs) {
    return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
  };
  cert.objective_ok = ok(cert.objective_lhs, cert.objective_rhs);
  cert.residual_ok = ok(cert.residual_lhs, cert.residual_rhs);
  return cert;
}

ViGapReport vi_gap(std::span<const SolverState> states, long t_horizon,
                   const LossTerm& f, const Regularizer& g,
                   const ConstraintSpec& cons, const Eigen::VectorXd& probe_x,
                   const Eigen::VectorXd& probe_z, const Eigen::VectorXd& probe_y,
                   double rho) {
  if (t_horizon < 1) throw ParameterError("vi_gap: horizon must be >= 1");
  if (static_cast<long>(states.size()) < t_horizon + 1) {
    throw ParameterError("vi_gap: trajectory shorter than horizon");
  }
  ViGapReport report;
  report.x_bar = Eigen::VectorXd::Zero(cons.n1());
  report.z_bar = Eigen::VectorXd::Zero(cons.n2());
  report.y_bar = Eigen::VectorXd::Zero(cons.m());
  for (long t = 1; t <= t_horizon; ++t) {
    report.x_bar += states[t].x;
    report.z_bar += states[t].z;
    report.y_bar += states[t].y;
  }
  const double inv_t = 1.0 / static_cast<double>(t_horizon);
  report.x_bar *= inv_t;
  report.z_bar *= inv_t;
  report.y_bar *= inv_t;

  const double h_bar = f.value(report.x_bar) + g.value(report.z_bar);
  const double h_probe = f.value(probe_x) + g.value(probe_z);
  // (w_bar - w)^T F(w_bar) with F(w) = [A^T y; B^T y; -(Ax + Bz - c)]
  const Eigen::VectorXd r_bar = cons.residual(report.x_bar, report.z_bar);
  const double cross = cons.a().apply_transpose(report.y_bar).dot(report.x_bar - probe_x) +
                       cons.b().apply_transpose(report.y_bar).dot(report.z_bar - probe_z) -
                       r_bar.dot(report.y_bar - probe_y);
  report.gap = h_bar - h_probe + cross;
  report.bound_l = 0.5 * rho * (cons.a().apply(probe_x) - cons.c()).squaredNorm() +
                   probe_y.squaredNorm() / (2.0 * rho);
  report.bound_over_t = report.bound_l * inv_t;
  return report;
}

}  // namespace oadm
