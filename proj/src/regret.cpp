#include "oadm/regret.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "oadm/enumerate.hpp"
#include "oadm/error.hpp"
#include "oadm/linalg.hpp"

namespace oadm {

void RegretLedger::record_round(const RoundRecord& rec) {
  if (rec.t != rounds()) {
    throw UsageError("RegretLedger: rounds must be recorded in order");
  }
  records_.push_back(rec);
  const double played = rec.loss_x + rec.loss_g;
  const double companion = rec.loss_xhat + rec.loss_g;
  const double rc = rec.primal_sq + rec.dual_sq;
  played_prefix_.push_back(played_prefix_.empty() ? played
                                                  : played_prefix_.back() + played);
  companion_prefix_.push_back(
      companion_prefix_.empty() ? companion : companion_prefix_.back() + companion);
  rc_prefix_.push_back(rc_prefix_.empty() ? rc : rc_prefix_.back() + rc);
}

void RegretLedger::record_run(const OnlineRunResult& run) {
  for (const RoundRecord& rec : run.records) record_round(rec);
}

void RegretLedger::check_index(long t) const {
  if (t < 0 || t >= rounds()) throw UsageError("RegretLedger: round out of range");
}

double RegretLedger::played_loss_sum(long t) const {
  check_index(t);
  return played_prefix_[t];
}

double RegretLedger::companion_loss_sum(long t) const {
  check_index(t);
  return companion_prefix_[t];
}

double RegretLedger::constraint_regret(long t) const {
  check_index(t);
  return rc_prefix_[t] - rc_prefix_[0];
}

double RegretLedger::constraint_sum_from_zero(long t) const {
  check_index(t);
  return rc_prefix_[t];
}

double RegretLedger::r1(long t, double comparator_value) const {
  return played_loss_sum(t) - comparator_value;
}

double RegretLedger::r2(long t, double comparator_value) const {
  return companion_loss_sum(t) - comparator_value;
}

std::vector<double> per_round_comparator_losses(const LossStream& stream,
                                                const Regularizer& g,
                                                const Eigen::VectorXd& x_star,
                                                const Eigen::VectorXd& z_star,
                                                long t_horizon) {
  std::vector<double> out;
  out.reserve(t_horizon + 1);
  const double g_star = g.value(z_star);
  for (long t = 0; t <= t_horizon; ++t) {
    out.push_back(stream.term(t).value(x_star) + g_star);
  }
  return out;
}

double empirical_f_bound(const RegretLedger& ledger, const LossStream& stream,
                         const Regularizer& g, const Eigen::VectorXd& x_star,
                         const Eigen::VectorXd& z_star, long t_horizon) {
  if (t_horizon >= ledger.rounds()) {
    throw UsageError("empirical_f_bound: horizon beyond recorded rounds");
  }
  const double g_star = g.value(z_star);
  double f_bound = 0.0;
  const auto& records = ledger.records();
  for (long t = 0; t <= t_horizon; ++t) {
    // post_loss is f_t(x_{t+1}) + g(z_{t+1}) for the round-t update
    const double comp = stream.term(t).value(x_star) + g_star;
    f_bound = std::max(f_bound, comp - records[t].post_loss);
  }
  return f_bound;
}

AggregateLoss aggregate_cyclic(const CyclicLossStream& stream, long t_horizon) {
  const GenLassoInstance& inst = stream.instance();
  AggregateLoss agg;
  agg.rows = inst.data;
  agg.targets = inst.targets;
  agg.counts = Eigen::VectorXd::Zero(inst.N);
  const long rounds = t_horizon + 1;
  for (long i = 0; i < inst.N; ++i) {
    agg.counts[i] = static_cast<double>(rounds / inst.N + (i < rounds % inst.N ? 1 : 0));
  }
  agg.tikhonov_total = stream.tikhonov() * static_cast<double>(rounds);
  agg.rounds = rounds;
  return agg;
}

namespace {

// Objective of the reduced single-variable problem
//   (1/rounds) sum_i w_i (r_i.v - b_i)^2 + (mu/2)||v||^2 + lambda||v||_1
double reduced_objective(const Eigen::MatrixXd& rows, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& w, double scale, double mu,
                         double lambda, const Eigen::VectorXd& v) {
  const Eigen::VectorXd r = rows * v - b;
  return scale * r.cwiseProduct(w).dot(r) + 0.5 * mu * v.squaredNorm() +
         lambda * v.lpNorm<1>();
}

// One support-polish pass: solve the stationarity system on the current
// support, keep the result only if it is sign-consistent, dual-feasible and
// improves the objective.
Eigen::VectorXd polish_l1(const Eigen::MatrixXd& rows, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& w, double scale, double mu,
                          double lambda, const Eigen::VectorXd& v0) {
  const Eigen::Index n = rows.cols();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v0[i]) > 1e-9) support.push_back(i);
  }
  if (support.empty() || static_cast<Eigen::Index>(support.size()) > rows.rows() + 8) {
    return v0;
  }
  const Eigen::Index s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd rs(rows.rows(), s);
  for (Eigen::Index a = 0; a < s; ++a) rs.col(a) = rows.col(support[a]);
  Eigen::MatrixXd gram = (2.0 * scale) * (rs.transpose() * w.asDiagonal() * rs);
  gram.diagonal().array() += mu;
  Eigen::VectorXd rhs = (2.0 * scale) * (rs.transpose() * w.cwiseProduct(b));
  for (Eigen::Index a = 0; a < s; ++a) {
    rhs[a] -= lambda * (v0[support[a]] > 0.0 ? 1.0 : -1.0);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return v0;
  const Eigen::VectorXd vs = ldlt.solve(rhs);
  if (!vs.allFinite()) return v0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (Eigen::Index a = 0; a < s; ++a) {
    if (vs[a] * (v0[support[a]] > 0.0 ? 1.0 : -1.0) < 0.0) return v0;
    v[support[a]] = vs[a];
  }
  // dual feasibility off the support
  const Eigen::VectorXd resid = rows * v - b;
  const Eigen::VectorXd grad =
      (2.0 * scale) * (rows.transpose() * w.cwiseProduct(resid));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (v[i] == 0.0 && std::abs(grad[i]) > lambda * (1.0 + 1e-8) + 1e-12) return v0;
  }
  const double before = reduced_objective(rows, b, w, scale, mu, lambda, v0);
  const double after = reduced_objective(rows, b, w, scale, mu, lambda, v);
  return after <= before ? v : v0;
}

}  // namespace

ComparatorResult comparator(const AggregateLoss& agg, const Regularizer& g,
                            const ConstraintSpec& cons,
                            const ComparatorOptions& opts) {
  if (agg.rounds < 1) throw ParameterError("comparator: needs at least one round");
  const double scale = 1.0 / static_cast<double>(agg.rounds);
  const bool zero_c = cons.c().size() == 0 || cons.c().lpNorm<Eigen::Infinity>() == 0.0;
  const bool l1_g = g.kind() == Regularizer::Kind::L1;

  // Reduction to a single-variable l1 least-squares problem, when available.
  // A = I: v = x = z. A = D (and no ridge on x): v = D x = z, with the rows
  // applied through D^{-1}.
  bool reduced = false;
  Eigen::MatrixXd red_rows;
  double red_mu = 0.0;
  const bool identity_form = cons.a().is_identity() &&
                             cons.b().is_negated_identity() && zero_c && l1_g;
  const bool difference_form = cons.a().is_bidiagonal() &&
                               cons.b().is_negated_identity() && zero_c && l1_g &&
                               agg.tikhonov_total == 0.0;
  if (identity_form && agg.rows.rows() > 0) {
    red_rows = agg.rows;
    red_mu = scale * agg.tikhonov_total + g.strong_convexity();
    reduced = true;
  } else if (difference_form && agg.rows.rows() > 0) {
    const linalg::BidiagonalDifference& d = cons.a().bidiagonal();
    red_rows.resize(agg.rows.rows(), agg.rows.cols());
    for (Eigen::Index i = 0; i < agg.rows.rows(); ++i) {
      red_rows.row(i) = d.solve_transpose(agg.rows.row(i).transpose()).transpose();
    }
    red_mu = g.strong_convexity();
    reduced = true;
  }

  ComparatorResult result;
  if (reduced) {
    Eigen::VectorXd v;
    if (agg.rows.cols() <= 12) {
      v = enumerate_l1_least_squares(red_rows, agg.targets, agg.counts, scale,
                                     red_mu, g.lambda())
              .v;
    } else {
      LossTerm reduced_loss = LossTerm::least_squares_batch(
          red_rows, agg.targets, scale, red_mu, agg.counts);
      Regularizer reduced_g = Regularizer::l1(g.lambda());
      ConstraintSpec reduced_cons = ConstraintSpec::splitting(agg.rows.cols());
      BatchRunOptions bopts;
      bopts.stop = opts.stop;
      BatchRunResult run =
          run_batch(reduced_loss, reduced_g, reduced_cons, opts.rho, bopts);
      result.approximate = !run.converged;
      v = run.final_state.z;  // the sparse iterate
      if (opts.polish) {
        v = polish_l1(red_rows, agg.targets, agg.counts, scale, red_mu,
                      g.lambda(), v);
      }
    }
    if (identity_form) {
      result.x = v;
      result.z = v;
    } else {
      result.x = cons.a().bidiagonal().solve(v);
      result.z = v;
    }
  } else {
    // Generic route: tightly-stopped batch run on the original splitting.
    LossTerm f = agg.rows.rows() > 0
                     ? LossTerm::least_squares_batch(agg.rows, agg.targets, scale,
                                                     scale * agg.tikhonov_total,
                                                     agg.counts)
                     : LossTerm::zero(cons.n1());
    BatchRunOptions bopts;
    bopts.stop = opts.stop;
    BatchRunResult run = run_batch(f, g, cons, opts.rho, bopts);
    result.approximate = !run.converged;
    result.x = run.final_state.x;
    result.z = run.final_state.z;
    // Restore exact feasibility through z when B allows it.
    if (cons.b().is_negated_identity()) {
      result.z = cons.a().apply(result.x) - cons.c();
    }
  }
  result.feasibility_residual = cons.residual(result.x, result.z).norm();

  // Honest cumulative value at the returned feasible pair.
  double ls = 0.0;
  if (agg.rows.rows() > 0) {
    const Eigen::VectorXd r = agg.rows * result.x - agg.targets;
    ls = r.cwiseProduct(agg.counts).dot(r);
  }
  result.value = ls + 0.5 * agg.tikhonov_total * result.x.squaredNorm() +
                 static_cast<double>(agg.rounds) * g.value(result.z);
  return result;
}

ComparatorResult comparator(const CyclicLossStream& stream, long t_horizon,
                            const Regularizer& g, const ConstraintSpec& cons,
                            const ComparatorOptions& opts) {
  return comparator(aggregate_cyclic(stream, t_horizon), g, cons, opts);
}

namespace {

BoundCertificate make_certificate(TheoremId id, double lhs, double rhs) {
  BoundCertificate cert;
  cert.theorem = id;
  cert.lhs = lhs;
  cert.rhs = rhs;
  cert.satisfied = lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
  cert.margin = rhs - lhs;
  return cert;
}

}  // namespace

TheoremCertificates certify(const RegretLedger& ledger, long t_horizon,
                            TheoremId id, const AssumptionBundle& a,
                            const StepSchedule& schedule,
                            const linalg::SpectralInfo& spectral,
                            double comparator_value) {
  if (!schedule.theorem || *schedule.theorem != id) {
    throw UsageError("certify: the run's schedule does not match the theorem");
  }
  const bool empty = ledger.rounds() == 0;
  if (!empty) {
    if (t_horizon >= ledger.rounds()) {
      throw UsageError("certify: horizon beyond recorded rounds");
    }
    if (schedule.t_horizon >= 0 && schedule.t_horizon != t_horizon) {
      throw UsageError("certify: schedule horizon differs from certified horizon");
    }
  }
  const double t = static_cast<double>(t_horizon);
  const double log_t1 = std::log(t + 1.0);
  const double lmax = spectral.lambda_max_BtB;
  double obj_rhs = 0.0;
  double con_rhs = 0.0;
  bool objective_is_companion = false;
  switch (id) {
    case TheoremId::T3:
      obj_rhs = lmax * a.d_z * a.d_z * std::sqrt(t) / 2.0 +
                std::sqrt(2.0) * a.g_f * a.d_x * std::sqrt(t) / std::sqrt(a.alpha);
      con_rhs = lmax * a.d_z * a.d_z +
                std::sqrt(2.0) * a.d_x * a.g_f / std::sqrt(a.alpha) +
                2.0 * a.f_bound * std::sqrt(t);
      break;
    case TheoremId::T4:
      obj_rhs = a.g_f * a.g_f * log_t1 / (2.0 * a.alpha * a.beta1) +
                a.beta2 * a.d_z * a.d_z / 2.0 + a.beta1 * a.d_x * a.d_x;
      con_rhs = 2.0 * a.f_bound * lmax * log_t1 / a.beta2 + lmax * a.d_z * a.d_z +
                2.0 * a.beta1 * lmax * a.d_x * a.d_x / a.beta2;
      break;
    case TheoremId::T5: {
      if (!spectral.lambda_min_AAt) {
        throw UsageError("certify: lambda_min(A A^T) unavailable");
      }
      const double lmin = *spectral.lambda_min_AAt;
      obj_rhs = a.g_f * a.d_z * std::sqrt(lmax * t / lmin);
      con_rhs = lmax * a.d_z * a.d_z +
                2.0 * a.f_bound * a.d_z * std::sqrt(lmin * lmax * t) / a.g_f;
      objective_is_companion = true;
      break;
    }
    case TheoremId::T6: {
      if (!spectral.lambda_min_AAt) {
        throw UsageError("certify: lambda_min(A A^T) unavailable");
      }
      const double lmin = *spectral.lambda_min_AAt;
      obj_rhs = a.g_f * a.g_f * lmax * log_t1 / (2.0 * lmin * a.beta2) +
                a.beta2 * a.d_z * a.d_z;
      con_rhs = lmax * a.d_z * a.d_z + 2.0 * a.f_bound * lmax * log_t1 / a.beta2;
      objective_is_companion = true;
      break;
    }
    default:
      throw UsageError("certify: not an online regret theorem");
  }
  double obj_lhs = 0.0;
  double con_lhs = 0.0;
  if (!empty) {
    obj_lhs = objective_is_companion ? ledger.r2(t_horizon, comparator_value)
                                     : ledger.r1(t_horizon, comparator_value);
    con_lhs = ledger.constraint_regret(t_horizon);
  }
  TheoremCertificates certs;
  certs.objective = make_certificate(id, obj_lhs, obj_rhs);
  certs.constraint = make_certificate(id, con_lhs, con_rhs);
  return certs;
}

void export_ledger_csv(const RegretLedger& ledger, const std::string& path,
                       const std::vector<double>* comparator_losses) {
  std::ofstream out(path);
  if (!out) throw IoError("export_ledger_csv: cannot open " + path);
  out << "t,ft_xt,g_zt,ft_xhat,primal_sq,dual_sq,R1_running,R2_running,Rc_running\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double comp_prefix = 0.0;
  char buf[352];
  for (long t = 0; t < ledger.rounds(); ++t) {
    const RoundRecord& rec = ledger.records()[t];
    double r1 = nan;
    double r2 = nan;
    if (comparator_losses != nullptr &&
        t < static_cast<long>(comparator_losses->size())) {
      comp_prefix += (*comparator_losses)[t];
      r1 = ledger.played_loss_sum(t) - comp_prefix;
      r2 = std::isnan(rec.loss_xhat) ? nan
                                     : ledger.companion_loss_sum(t) - comp_prefix;
    }
    std::snprintf(buf, sizeof(buf),
                  "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", rec.t,
                  rec.loss_x, rec.loss_g, rec.loss_xhat, rec.primal_sq, rec.dual_sq,
                  r1, r2, ledger.constraint_regret(t));
    out << buf;
  }
  if (!out) throw IoError("export_ledger_csv: write failed for " + path);
}

}  // namespace oadm
