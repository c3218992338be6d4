#pragma once

#include <functional>

#include <Eigen/Dense>

#include "oadm/constraint.hpp"
#include "oadm/genlasso.hpp"
#include "oadm/loss.hpp"

namespace oadm {

// Forward-backward splitting: explicit gradient step on f_t at z_t, then the
// prox of g, both at scale tau:
//   w = z_t - (1/tau) f'_t(z_t),   z_{t+1} = argmin g(z) + (tau/2)||z - w||^2.
Eigen::VectorXd fobos_step(const Eigen::VectorXd& z, const LossTerm& f,
                           const Regularizer& g, double tau);

using Projector = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Gradient step, then Euclidean projection onto the declared convex set.
Eigen::VectorXd projected_gradient_step(const Eigen::VectorXd& z, const LossTerm& f,
                                        const Projector& project, double tau);

struct RdaConfig {
  double gamma = 1.0;
  double lambda = 0.0;
};

// l1 dual averaging with proximal strength gamma / sqrt(t): truncates the
// running average gradient at level lambda, scales by -sqrt(t)/gamma.
Eigen::VectorXd rda_step(const Eigen::VectorXd& avg_grad, long t,
                         const RdaConfig& cfg);

// Runs the forward-backward iteration over the stream for rounds 0..T-1; the
// observer sees (t, play z_t, z_{t+1}).
using BaselineObserver =
    std::function<void(long, const Eigen::VectorXd&, const Eigen::VectorXd&)>;

Eigen::VectorXd run_fobos(const LossStream& stream, const Regularizer& g,
                          const std::function<double(long)>& tau_of, long rounds,
                          const BaselineObserver& observer = nullptr);

Eigen::VectorXd run_rda(const LossStream& stream, const RdaConfig& cfg, long rounds,
                        const BaselineObserver& observer = nullptr);

// Runs the forward-backward iteration and, side by side, the single-pass
// splitting update whose x-subproblem is linearized at z_t with the dual
// folded into the prox center; returns the max infinity-norm iterate gap
// over the horizon. Requires the plain splitting constraint (A = I, B = -I,
// c = 0) and rho = tau.
double fobos_as_inexact_oadm_check(const LossStream& stream, const Regularizer& g,
                                   const ConstraintSpec& cons,
                                   const std::function<double(long)>& tau_of,
                                   long rounds);

// Difference-substitution reformulation of a total-variation instance into
// lasso form: each data row a is replaced by the solution of D^T v = a, so
// rows act on the difference variable; the signal is recovered afterwards by
// back substitution.
GenLassoInstance reformulate_tv_as_lasso(const GenLassoInstance& tv);
Eigen::VectorXd recover_tv_signal(const Eigen::VectorXd& y);

}  // namespace oadm
