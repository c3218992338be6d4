#include "oadm/baselines.hpp"

#include <cmath>

#include "oadm/error.hpp"
#include "oadm/linalg.hpp"

namespace oadm {

Eigen::VectorXd fobos_step(const Eigen::VectorXd& z, const LossTerm& f,
                           const Regularizer& g, double tau) {
  if (!(tau > 0.0)) throw ParameterError("fobos_step: tau must be > 0");
  const Eigen::VectorXd w = z - f.subgradient(z) / tau;
  return g.prox(w, tau);
}

Eigen::VectorXd projected_gradient_step(const Eigen::VectorXd& z, const LossTerm& f,
                                        const Projector& project, double tau) {
  if (!(tau > 0.0)) throw ParameterError("projected_gradient_step: tau must be > 0");
  return project(z - f.subgradient(z) / tau);
}

Eigen::VectorXd rda_step(const Eigen::VectorXd& avg_grad, long t,
                         const RdaConfig& cfg) {
  if (t < 1) throw ParameterError("rda_step: t must be >= 1");
  if (!(cfg.gamma > 0.0) || cfg.lambda < 0.0) {
    throw ParameterError("rda_step: gamma must be > 0, lambda >= 0");
  }
  const double scale = -std::sqrt(static_cast<double>(t)) / cfg.gamma;
  Eigen::VectorXd z = linalg::shrink(avg_grad, cfg.lambda);
  z *= scale;
  return z;
}

Eigen::VectorXd run_fobos(const LossStream& stream, const Regularizer& g,
                          const std::function<double(long)>& tau_of, long rounds,
                          const BaselineObserver& observer) {
  if (rounds < 1) throw ParameterError("run_fobos: rounds must be >= 1");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(stream.dim());
  for (long t = 0; t < rounds; ++t) {
    Eigen::VectorXd z_next = fobos_step(z, stream.term(t), g, tau_of(t));
    if (observer) observer(t, z, z_next);
    z = std::move(z_next);
  }
  return z;
}

Eigen::VectorXd run_rda(const LossStream& stream, const RdaConfig& cfg, long rounds,
                        const BaselineObserver& observer) {
  if (rounds < 1) throw ParameterError("run_rda: rounds must be >= 1");
  const Eigen::Index n = stream.dim();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd avg_grad = Eigen::VectorXd::Zero(n);
  for (long t = 0; t < rounds; ++t) {
    const Eigen::VectorXd grad = stream.term(t).subgradient(z);
    const double count = static_cast<double>(t + 1);
    avg_grad += (grad - avg_grad) / count;
    Eigen::VectorXd z_next = rda_step(avg_grad, t + 1, cfg);
    if (observer) observer(t, z, z_next);
    z = std::move(z_next);
  }
  return z;
}

double fobos_as_inexact_oadm_check(const LossStream& stream, const Regularizer& g,
                                   const ConstraintSpec& cons,
                                   const std::function<double(long)>& tau_of,
                                   long rounds) {
  if (!cons.a().is_identity() || !cons.b().is_negated_identity() ||
      cons.c().lpNorm<Eigen::Infinity>() != 0.0) {
    throw CapabilityError(
        "fobos_as_inexact_oadm_check: needs the plain splitting constraint");
  }
  const Eigen::Index n = stream.dim();
  Eigen::VectorXd z_fobos = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z_oadm = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  double max_gap = 0.0;
  for (long t = 0; t < rounds; ++t) {
    const LossTerm f = stream.term(t);
    const double tau = tau_of(t);
    if (!(tau > 0.0)) throw ParameterError("fobos_as_inexact_oadm_check: tau <= 0");
    z_fobos = fobos_step(z_fobos, f, g, tau);

    // x-update linearized at z_t, then the usual prox and dual steps with
    // the prox center shifted by y/tau.
    const Eigen::VectorXd x_next = z_oadm - (f.subgradient(z_oadm) + y) / tau;
    const Eigen::VectorXd z_next = g.prox(x_next + y / tau, tau);
    y += tau * (x_next - z_next);
    z_oadm = z_next;

    max_gap = std::max(max_gap, (z_fobos - z_oadm).lpNorm<Eigen::Infinity>());
  }
  return max_gap;
}

GenLassoInstance reformulate_tv_as_lasso(const GenLassoInstance& tv) {
  if (tv.kind != ProblemKind::TotalVariation) {
    throw ParameterError("reformulate_tv_as_lasso: instance is not total variation");
  }
  const linalg::BidiagonalDifference d{tv.n};
  GenLassoInstance lasso = tv;
  lasso.kind = ProblemKind::Lasso;
  for (long i = 0; i < tv.N; ++i) {
    lasso.data.row(i) = d.solve_transpose(tv.data.row(i).transpose()).transpose();
  }
  lasso.ground_truth = d.apply(tv.ground_truth);
  return lasso;
}

Eigen::VectorXd recover_tv_signal(const Eigen::VectorXd& y) {
  const linalg::BidiagonalDifference d{y.size()};
  return d.solve(y);
}

}  // namespace oadm
