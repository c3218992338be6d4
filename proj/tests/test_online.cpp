#include "oadm/online.hpp"

#include <gtest/gtest.h>

#include "oadm/error.hpp"
#include "oadm/genlasso.hpp"
#include "oadm/regret.hpp"
#include "oadm/rng.hpp"
#include "oracles.hpp"

namespace oadm {
namespace {

TEST(OadmStepExact, EtaZeroMatchesBatchStepBitwise) {
  const GenLassoInstance inst = generate_lasso({.N = 10, .n = 6, .k = 2, .seed = 3});
  const ConstraintSpec cons = inst.constraint();
  const LossTerm f = inst.batch_loss();
  const Regularizer g = inst.regularizer();
  SolverState batch = make_initial_state(cons);
  SolverState online = make_initial_state(cons);
  for (int k = 0; k < 20; ++k) {
    const AdmmStepResult bs = admm_step(batch, f, g, cons, 1.3);
    const RoundOutput os = oadm_step_exact(online, f, g, cons, 0.0, 1.3);
    EXPECT_EQ(bs.state.x, os.x_next);
    EXPECT_EQ(bs.state.z, os.z_next);
    EXPECT_EQ(bs.state.y, os.y_next);
    batch = bs.state;
    online.x = os.x_next;
    online.z = os.z_next;
    online.y = os.y_next;
  }
}

TEST(OadmStepExact, HugeEtaPinsIterate) {
  const GenLassoInstance inst = generate_lasso({.N = 10, .n = 6, .k = 2, .seed = 4});
  const ConstraintSpec cons = inst.constraint();
  Rng rng(20);
  SolverState s = make_initial_state(cons);
  s.x = rng.normal_vector(6);
  s.z = rng.normal_vector(6);
  s.y = rng.normal_vector(6);
  const RoundOutput out =
      oadm_step_exact(s, inst.cyclic_loss(0), inst.regularizer(), cons, 1e12, 1.0);
  EXPECT_LT((out.x_next - s.x).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(OadmStepExact, MatchesDenseNormalEquationsOracle) {
  // identity coupling
  {
    const GenLassoInstance inst =
        generate_lasso({.N = 9, .n = 6, .k = 2, .seed = 5});
    const ConstraintSpec cons = inst.constraint();
    Rng rng(21);
    SolverState s = make_initial_state(cons);
    s.x = rng.normal_vector(6);
    s.z = rng.normal_vector(6);
    s.y = rng.normal_vector(6);
    const double eta = 0.7;
    const double rho = 1.9;
    const LossTerm f = inst.cyclic_loss(2);
    const RoundOutput out = oadm_step_exact(s, f, inst.regularizer(), cons, eta, rho);
    const Eigen::VectorXd a = inst.data.row(2).transpose();
    const Eigen::MatrixXd m = 2.0 * a * a.transpose() +
                              (rho + eta) * Eigen::MatrixXd::Identity(6, 6);
    const Eigen::VectorXd rhs =
        2.0 * inst.targets[2] * a - (s.y + rho * (-s.z)) + eta * s.x;
    const Eigen::VectorXd expected = oracles::dense_solve(m, rhs);
    EXPECT_LT((out.x_next - expected).norm() / expected.norm(), 1e-12);
  }
  // difference coupling
  {
    DataGenConfig cfg;
    cfg.N = 9;
    cfg.n = 6;
    cfg.segments = 2;
    cfg.seed = 6;
    cfg.kind = ProblemKind::TotalVariation;
    const GenLassoInstance inst = generate_tv(cfg);
    const ConstraintSpec cons = inst.constraint();
    Rng rng(22);
    SolverState s = make_initial_state(cons);
    s.x = rng.normal_vector(6);
    s.z = rng.normal_vector(6);
    s.y = rng.normal_vector(6);
    const double eta = 0.3;
    const double rho = 2.5;
    const LossTerm f = inst.cyclic_loss(4);
    const RoundOutput out = oadm_step_exact(s, f, inst.regularizer(), cons, eta, rho);
    const Eigen::VectorXd a = inst.data.row(4).transpose();
    const Eigen::MatrixXd d = oracles::difference_matrix(6);
    const Eigen::MatrixXd m = 2.0 * a * a.transpose() + rho * d.transpose() * d +
                              eta * Eigen::MatrixXd::Identity(6, 6);
    const Eigen::VectorXd rhs = 2.0 * inst.targets[4] * a -
                                d.transpose() * (s.y + rho * (-s.z)) + eta * s.x;
    const Eigen::VectorXd expected = oracles::dense_solve(m, rhs);
    EXPECT_LT((out.x_next - expected).norm() / expected.norm(), 1e-12);
  }
}

TEST(OadmStepExact, CustomLossWithoutSolverThrows) {
  const ConstraintSpec cons = ConstraintSpec::splitting(2);
  const LossTerm f = LossTerm::custom(
      2, [](const Eigen::VectorXd& x) { return x.squaredNorm(); },
      [](const Eigen::VectorXd& x) { return Eigen::VectorXd(2.0 * x); });
  const SolverState s = make_initial_state(cons);
  EXPECT_THROW(oadm_step_exact(s, f, Regularizer::zero(), cons, 0.0, 1.0),
               CapabilityError);
}

TEST(OadmStepLinearized, ZeroGradientFeasibleStateIsFixedPoint) {
  const ConstraintSpec cons = ConstraintSpec::splitting(3);
  SolverState s = make_initial_state(cons);
  s.x = Eigen::VectorXd::Constant(3, 0.4);
  s.z = s.x;  // feasible
  const LossTerm f = LossTerm::zero(3);
  const RoundOutput out =
      oadm_step_linearized(s, f, Regularizer::zero(), cons, 2.0, 1.0);
  EXPECT_EQ(out.x_next, s.x);
}

TEST(OadmStepLinearized, EtaZeroThrows) {
  const ConstraintSpec cons = ConstraintSpec::splitting(2);
  const SolverState s = make_initial_state(cons);
  EXPECT_THROW(oadm_step_linearized(s, LossTerm::zero(2), Regularizer::zero(), cons,
                                    0.0, 1.0),
               ParameterError);
}

TEST(OadmStepLinearized, MatchesExplicitQuadraticArgmin) {
  const GenLassoInstance inst = generate_lasso({.N = 8, .n = 5, .k = 2, .seed = 7});
  const ConstraintSpec cons = inst.constraint();
  Rng rng(23);
  SolverState s = make_initial_state(cons);
  s.x = rng.normal_vector(5);
  s.z = rng.normal_vector(5);
  s.y = rng.normal_vector(5);
  const double eta = 3.1;
  const double rho = 0.8;
  const LossTerm f = inst.cyclic_loss(1);
  const RoundOutput out =
      oadm_step_linearized(s, f, inst.regularizer(), cons, eta, rho);
  const Eigen::VectorXd grad = f.subgradient(s.x) + s.y + rho * (s.x - s.z);
  const Eigen::MatrixXd m = eta * Eigen::MatrixXd::Identity(5, 5);
  const Eigen::VectorXd expected = oracles::quadratic_argmin(m, eta * s.x - grad);
  EXPECT_LT((out.x_next - expected).norm(), 1e-12);
}

TEST(FeasibleCompanion, IdentityCouplingReturnsZ) {
  const ConstraintSpec cons = ConstraintSpec::splitting(4);
  Rng rng(24);
  const Eigen::VectorXd z = rng.normal_vector(4);
  EXPECT_EQ(feasible_companion(z, cons), z);
}

TEST(FeasibleCompanion, DifferenceCouplingSolvesExactly) {
  const ConstraintSpec cons = ConstraintSpec::difference_splitting(7);
  Rng rng(25);
  const Eigen::VectorXd z = rng.normal_vector(7);
  const Eigen::VectorXd x_hat = feasible_companion(z, cons);
  EXPECT_LT((cons.a().apply(x_hat) - z).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(FeasibleCompanion, FeasiblePairRecoversComparator) {
  const ConstraintSpec cons = ConstraintSpec::difference_splitting(5);
  Rng rng(26);
  const Eigen::VectorXd x_star = rng.normal_vector(5);
  const Eigen::VectorXd z_star = cons.a().apply(x_star);
  EXPECT_LT((feasible_companion(z_star, cons) - x_star).norm(), 1e-12);
}

TEST(FeasibleCompanion, NonInvertibleThrows) {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 1.0;
  const ConstraintSpec cons(LinearMap::dense(a, /*declared_invertible=*/false),
                            LinearMap::negated_identity(2), Eigen::VectorXd::Zero(2));
  EXPECT_THROW(feasible_companion(Eigen::VectorXd::Zero(2), cons), CapabilityError);
}

TEST(RunOnline, ZeroLossesKeepIteratesFixedWithZeroRegret) {
  const ConstraintSpec cons = ConstraintSpec::splitting(3);
  const FixedLossStream stream(LossTerm::zero(3));
  OadmConfig config;
  config.schedule = StepSchedule::constant(0.0, 1.0);
  const OnlineRunResult run =
      run_online(stream, Regularizer::zero(), cons, config, 50);
  EXPECT_EQ(run.final_state.x, Eigen::VectorXd::Zero(3));
  EXPECT_EQ(run.final_state.z, Eigen::VectorXd::Zero(3));
  RegretLedger ledger;
  ledger.record_run(run);
  EXPECT_DOUBLE_EQ(ledger.played_loss_sum(50), 0.0);
  EXPECT_DOUBLE_EQ(ledger.constraint_regret(50), 0.0);
}

TEST(RunOnline, SinglePassContract) {
  const GenLassoInstance inst = generate_lasso({.N = 10, .n = 6, .k = 2, .seed = 8});
  const CyclicLossStream stream(inst);
  OadmConfig config;
  config.schedule = StepSchedule::constant(1.0, 1.0);
  const long t_horizon = 37;
  const OnlineRunResult run =
      run_online(stream, inst.regularizer(), inst.constraint(), config, t_horizon);
  EXPECT_EQ(run.x_solve_count, t_horizon + 1);
  EXPECT_EQ(run.z_prox_count, t_horizon + 1);
  EXPECT_EQ(run.dual_update_count, t_horizon + 1);
  EXPECT_EQ(static_cast<long>(run.records.size()), t_horizon + 1);
}

TEST(RunOnline, DualIdentityEveryRound) {
  const GenLassoInstance inst = generate_lasso({.N = 10, .n = 6, .k = 2, .seed = 9});
  const CyclicLossStream stream(inst);
  const ConstraintSpec cons = inst.constraint();
  OadmConfig config;
  config.schedule = StepSchedule::custom([](long t) { return 0.5 * t; },
                                         [](long t) { return 1.0 + 0.1 * t; });
  SolverState prev = make_initial_state(cons);
  bool checked = false;
  const RoundObserver observer = [&](const RoundRecord& rec,
                                     const SolverState& state) {
    const Eigen::VectorXd expected =
        prev.y + rec.rho_t * cons.residual(state.x, state.z);
    EXPECT_EQ(state.y, expected);
    prev = state;
    checked = true;
  };
  run_online(stream, inst.regularizer(), cons, config, 25, observer);
  EXPECT_TRUE(checked);
}

TEST(RunOnline, CompanionScenarioStaysFeasibleEveryRound) {
  DataGenConfig cfg;
  cfg.N = 10;
  cfg.n = 8;
  cfg.segments = 3;
  cfg.seed = 10;
  cfg.kind = ProblemKind::TotalVariation;
  const GenLassoInstance inst = generate_tv(cfg);
  const CyclicLossStream stream(inst);
  OadmConfig config;
  config.scenario = Scenario::FeasibleCompanion;
  config.schedule = StepSchedule::constant(0.0, 2.0);
  const OnlineRunResult run =
      run_online(stream, inst.regularizer(), inst.constraint(), config, 200);
  EXPECT_LE(run.max_companion_residual, 1e-10);
  for (const RoundRecord& rec : run.records) {
    EXPECT_FALSE(std::isnan(rec.loss_xhat));
  }
}

TEST(RunOnline, DeterministicAcrossRuns) {
  const GenLassoInstance inst = generate_lasso({.N = 10, .n = 6, .k = 2, .seed = 11});
  const CyclicLossStream stream(inst);
  OadmConfig config;
  config.schedule = StepSchedule::constant(0.5, 1.0);
  const OnlineRunResult a =
      run_online(stream, inst.regularizer(), inst.constraint(), config, 60);
  const OnlineRunResult b =
      run_online(stream, inst.regularizer(), inst.constraint(), config, 60);
  EXPECT_EQ(a.final_state.x, b.final_state.x);
  EXPECT_EQ(a.final_state.z, b.final_state.z);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].loss_x, b.records[i].loss_x);
  }
}

TEST(RunOnline, TimeVaryingRhoStartsFromZeroPenalty) {
  // linear-t schedules begin with eta = rho = 0; the first update must still
  // be well defined (pure loss minimization, dual stays zero).
  const GenLassoInstance inst = generate_lasso({.N = 8, .n = 5, .k = 2, .seed = 12});
  const CyclicLossStream stream(inst, /*tikhonov=*/0.4);
  OadmConfig config;
  config.schedule = StepSchedule::linear_t(0.4, 0.3, 1.0);
  const Regularizer g = inst.regularizer(0.3);
  const OnlineRunResult run = run_online(stream, g, inst.constraint(), config, 30);
  EXPECT_TRUE(run.final_state.x.allFinite());
  EXPECT_DOUBLE_EQ(run.records[0].rho_t, 0.0);
}

TEST(StepSchedule, NamedConstructorsMatchFormulas) {
  const StepSchedule t3 = StepSchedule::sqrt_horizon(2.0, 1.5, 1.0, 400);
  EXPECT_NEAR(t3.rho(7), 20.0, 1e-12);
  EXPECT_NEAR(t3.eta(7), 2.0 * 20.0 / (1.5 * std::sqrt(2.0)), 1e-12);

  const StepSchedule t4 = StepSchedule::linear_t(0.3, 0.7, 2.0);
  EXPECT_NEAR(t4.eta(5), 1.5, 1e-15);
  EXPECT_NEAR(t4.rho(5), 0.7 * 5 / 2.0, 1e-15);

  const StepSchedule t5 =
      StepSchedule::sqrt_horizon_feasible(2.0, 0.5, 0.25, 4.0, 100);
  EXPECT_DOUBLE_EQ(t5.eta(3), 0.0);
  EXPECT_NEAR(t5.rho(3), 2.0 * 10.0 / (0.5 * 1.0), 1e-12);

  const StepSchedule t6 = StepSchedule::linear_t_feasible(0.7, 2.0);
  EXPECT_DOUBLE_EQ(t6.eta(9), 0.0);
  EXPECT_NEAR(t6.rho(9), 0.7 * 9 / 2.0, 1e-15);
}

}  // namespace
}  // namespace oadm
