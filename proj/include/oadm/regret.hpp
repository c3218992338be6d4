#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oadm/batch.hpp"
#include "oadm/genlasso.hpp"
#include "oadm/online.hpp"

namespace oadm {

// Append-only per-round accounting of the two regret notions: the objective
// regrets R1 (played pair) and R2 (feasible companion), both summed over
// rounds t = 0..T against the best fixed feasible comparator, and the
// constraint-violation regret, which by its definition sums the post-update
// residuals of rounds t = 1..T only. Column names keep the two indexing
// conventions explicit rather than normalizing them.
class RegretLedger {
 public:
  void record_round(const RoundRecord& rec);
  void record_run(const OnlineRunResult& run);

  long rounds() const { return static_cast<long>(records_.size()); }
  const std::vector<RoundRecord>& records() const { return records_; }

  // sum_{t=0}^{T} f_t(x_t) + g(z_t)
  double played_loss_sum(long t) const;
  // sum_{t=0}^{T} f_t(x_hat_t) + g(z_t)
  double companion_loss_sum(long t) const;
  // sum_{t=1}^{T} ||A x_{t+1} + B z_{t+1} - c||^2 + ||B z_{t+1} - B z_t||^2
  double constraint_regret(long t) const;
  // sum over all recorded rounds including t = 0 (diagnostic only)
  double constraint_sum_from_zero(long t) const;

  double r1(long t, double comparator_value) const;
  double r2(long t, double comparator_value) const;

 private:
  void check_index(long t) const;
  std::vector<RoundRecord> records_;
  std::vector<double> played_prefix_;
  std::vector<double> companion_prefix_;
  std::vector<double> rc_prefix_;  // primal_sq + dual_sq prefix including t=0
};

// f_t(x*) + g(z*) for t = 0..T; used for running-regret columns and the
// empirical F constant.
std::vector<double> per_round_comparator_losses(const LossStream& stream,
                                                const Regularizer& g,
                                                const Eigen::VectorXd& x_star,
                                                const Eigen::VectorXd& z_star,
                                                long t_horizon);

// Smallest F >= 0 with f_t(x_{t+1}) + g(z_{t+1}) - (f_t(x*) + g(z*)) >= -F
// over the recorded rounds.
double empirical_f_bound(const RegretLedger& ledger, const LossStream& stream,
                         const Regularizer& g, const Eigen::VectorXd& x_star,
                         const Eigen::VectorXd& z_star, long t_horizon);

// ---------------------------------------------------------------------------
// Comparator: min over A x + B z = c of sum_{t=0}^{T} f_t(x) + g(z).

// The revealed stream's cumulative loss, epitomized as weighted least squares:
// sum_t f_t(x) = sum_i counts_i (rows_i . x - targets_i)^2
//              + (tikhonov_total / 2) ||x||^2.
struct AggregateLoss {
  Eigen::MatrixXd rows;
  Eigen::VectorXd targets;
  Eigen::VectorXd counts;
  double tikhonov_total = 0.0;
  long rounds = 0;  // T + 1
};

AggregateLoss aggregate_cyclic(const CyclicLossStream& stream, long t_horizon);

struct ComparatorOptions {
  double rho = 1.0;
  StopCriteria stop{1e-12, 1e-12, 100000};
  bool polish = true;
};

struct ComparatorResult {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  double value = 0.0;
  bool approximate = false;          // solver hit the iteration cap
  double feasibility_residual = 0.0;  // ||A x + B z - c||
};

// Solves the aggregated batch problem: exact pattern enumeration when the
// problem reduces to an l1 least-squares form in at most 12 variables, a
// tightly-stopped batch run plus a support-polish step otherwise.
ComparatorResult comparator(const AggregateLoss& agg, const Regularizer& g,
                            const ConstraintSpec& cons,
                            const ComparatorOptions& opts = {});

ComparatorResult comparator(const CyclicLossStream& stream, long t_horizon,
                            const Regularizer& g, const ConstraintSpec& cons,
                            const ComparatorOptions& opts = {});

// ---------------------------------------------------------------------------
// Closed-form regret bounds.

struct BoundCertificate {
  TheoremId theorem = TheoremId::T3;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double margin = 0.0;  // rhs - lhs
};

struct TheoremCertificates {
  BoundCertificate objective;   // R1 (T3, T4) or R2 (T5, T6)
  BoundCertificate constraint;  // R^c
};

// Evaluates the certified bounds for the run recorded in the ledger. The
// schedule must be the one the theorem prescribes (UsageError otherwise);
// constants come from the bundle and the constraint's spectral info.
TheoremCertificates certify(const RegretLedger& ledger, long t_horizon,
                            TheoremId id, const AssumptionBundle& a,
                            const StepSchedule& schedule,
                            const linalg::SpectralInfo& spectral,
                            double comparator_value);

// Ledger CSV: t,ft_xt,g_zt,ft_xhat,primal_sq,dual_sq,R1_running,R2_running,
// Rc_running. Running regrets need the per-round comparator losses; they are
// emitted as nan when absent.
void export_ledger_csv(const RegretLedger& ledger, const std::string& path,
                       const std::vector<double>* comparator_losses = nullptr);

}  // namespace oadm
