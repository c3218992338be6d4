#include "oadm/genlasso.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oadm/error.hpp"
#include "oadm/linalg.hpp"
#include "oadm/rng.hpp"
#include "oracles.hpp"

namespace oadm {
namespace {

DataGenConfig small_lasso_config(std::uint64_t seed) {
  DataGenConfig cfg;
  cfg.N = 12;
  cfg.n = 8;
  cfg.k = 3;
  cfg.noise_sigma = 0.05;
  cfg.q = 0.5;
  cfg.seed = seed;
  return cfg;
}

long jump_count(const Eigen::VectorXd& x0) {
  long jumps = 0;
  for (Eigen::Index i = 0; i + 1 < x0.size(); ++i) {
    if (x0[i] != x0[i + 1]) ++jumps;
  }
  return jumps;
}

TEST(GenerateLasso, NoiselessOneDimensional) {
  DataGenConfig cfg;
  cfg.N = 1;
  cfg.n = 1;
  cfg.k = 1;
  cfg.noise_sigma = 0.0;
  cfg.seed = 3;
  const GenLassoInstance inst = generate_lasso(cfg);
  EXPECT_NEAR(std::abs(inst.data(0, 0)), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(inst.targets[0], inst.data(0, 0) * inst.ground_truth[0] / 1.0);
}

TEST(GenerateLasso, PaperShapeConfiguration) {
  DataGenConfig cfg;
  cfg.N = 100;
  cfg.n = 1000;
  cfg.k = 100;
  cfg.q = 0.5;
  cfg.seed = 1;
  const GenLassoInstance inst = generate_lasso(cfg);
  EXPECT_EQ(inst.data.rows(), 100);
  EXPECT_EQ(inst.data.cols(), 1000);
  long nnz = 0;
  for (Eigen::Index i = 0; i < inst.ground_truth.size(); ++i) {
    if (inst.ground_truth[i] != 0.0) ++nnz;
  }
  EXPECT_EQ(nnz, 100);
  const double lambda_max =
      (inst.data.transpose() * inst.targets / 100.0).lpNorm<Eigen::Infinity>();
  EXPECT_NEAR(inst.lambda, 0.5 * lambda_max, 1e-15 * lambda_max);
}

TEST(GenerateLasso, ColumnsAreUnitNorm) {
  const GenLassoInstance inst = generate_lasso(small_lasso_config(11));
  for (Eigen::Index j = 0; j < inst.n; ++j) {
    EXPECT_NEAR(inst.data.col(j).norm(), 1.0, 1e-12);
  }
}

TEST(GenerateLasso, DeterministicGivenSeed) {
  const GenLassoInstance a = generate_lasso(small_lasso_config(21));
  const GenLassoInstance b = generate_lasso(small_lasso_config(21));
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_EQ(a.ground_truth, b.ground_truth);
  EXPECT_EQ(a.lambda, b.lambda);
}

TEST(GenerateLasso, BadConfigThrows) {
  DataGenConfig cfg = small_lasso_config(1);
  cfg.k = cfg.n + 1;
  EXPECT_THROW(generate_lasso(cfg), ConfigError);
  cfg = small_lasso_config(1);
  cfg.noise_sigma = -0.5;
  EXPECT_THROW(generate_lasso(cfg), ConfigError);
}

TEST(GenerateTv, SingleSegmentHasNoJumps) {
  DataGenConfig cfg;
  cfg.N = 5;
  cfg.n = 10;
  cfg.segments = 1;
  cfg.seed = 2;
  cfg.kind = ProblemKind::TotalVariation;
  const GenLassoInstance inst = generate_tv(cfg);
  EXPECT_EQ(jump_count(inst.ground_truth), 0);
  // only the last-row convention of D contributes to D x0
  const linalg::BidiagonalDifference d{10};
  const Eigen::VectorXd dx = d.apply(inst.ground_truth);
  for (Eigen::Index i = 0; i + 1 < dx.size(); ++i) EXPECT_DOUBLE_EQ(dx[i], 0.0);
}

TEST(GenerateTv, ThreeSegmentsGiveTwoJumps) {
  DataGenConfig cfg;
  cfg.N = 5;
  cfg.n = 12;
  cfg.segments = 3;
  cfg.seed = 4;
  cfg.kind = ProblemKind::TotalVariation;
  const GenLassoInstance inst = generate_tv(cfg);
  EXPECT_EQ(jump_count(inst.ground_truth), 2);
  const linalg::BidiagonalDifference d{12};
  const Eigen::VectorXd dx = d.apply(inst.ground_truth);
  long nnz = 0;
  for (Eigen::Index i = 0; i + 1 < dx.size(); ++i) {
    if (dx[i] != 0.0) ++nnz;
  }
  EXPECT_EQ(nnz, 2);
}

TEST(GenerateTv, DeterministicGivenSeed) {
  DataGenConfig cfg;
  cfg.N = 6;
  cfg.n = 9;
  cfg.segments = 2;
  cfg.seed = 77;
  cfg.kind = ProblemKind::TotalVariation;
  const GenLassoInstance a = generate_tv(cfg);
  const GenLassoInstance b = generate_tv(cfg);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_EQ(a.ground_truth, b.ground_truth);
}

TEST(GenerateTv, EmptyPatternThrows) {
  DataGenConfig cfg;
  cfg.segments = 0;
  cfg.kind = ProblemKind::TotalVariation;
  EXPECT_THROW(generate_tv(cfg), ConfigError);
}

TEST(Objective, ZeroAtOrigin) {
  GenLassoInstance inst = generate_lasso(small_lasso_config(5));
  inst.targets.setZero();
  EXPECT_DOUBLE_EQ(inst.objective(Eigen::VectorXd::Zero(inst.n)), 0.0);
}

TEST(Objective, LambdaZeroIsPureLeastSquares) {
  GenLassoInstance inst = generate_lasso(small_lasso_config(6));
  inst.lambda = 0.0;
  Rng rng(30);
  const Eigen::VectorXd x = rng.normal_vector(inst.n);
  const double expected =
      (inst.data * x - inst.targets).squaredNorm() / static_cast<double>(inst.N);
  EXPECT_NEAR(inst.objective(x), expected, 1e-14);
}

TEST(Objective, MatchesIndependentTermByTermEvaluation) {
  const GenLassoInstance inst = generate_lasso(small_lasso_config(7));
  Rng rng(31);
  const Eigen::VectorXd x = rng.normal_vector(inst.n);
  double expected = 0.0;
  for (long i = 0; i < inst.N; ++i) {
    double dot = 0.0;
    for (long j = 0; j < inst.n; ++j) dot += inst.data(i, j) * x[j];
    expected += (dot - inst.targets[i]) * (dot - inst.targets[i]);
  }
  expected /= static_cast<double>(inst.N);
  for (long j = 0; j < inst.n; ++j) expected += inst.lambda * std::abs(x[j]);
  EXPECT_NEAR(inst.objective(x), expected, 1e-12 * (1.0 + std::abs(expected)));
}

TEST(Objective, ConvexAlongRandomSegments) {
  const GenLassoInstance inst = generate_lasso(small_lasso_config(8));
  Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd x = rng.normal_vector(inst.n);
    const Eigen::VectorXd y = rng.normal_vector(inst.n);
    const double theta = rng.uniform();
    const double lhs = inst.objective(theta * x + (1.0 - theta) * y);
    const double rhs = theta * inst.objective(x) + (1.0 - theta) * inst.objective(y);
    EXPECT_LE(lhs, rhs + 1e-9);
  }
}

TEST(CyclicLoss, WrapsAround) {
  const GenLassoInstance inst = generate_lasso(small_lasso_config(9));
  Rng rng(33);
  const Eigen::VectorXd x = rng.normal_vector(inst.n);
  const LossTerm t0 = inst.cyclic_loss(0);
  const LossTerm tn = inst.cyclic_loss(inst.N);
  const LossTerm t3 = inst.cyclic_loss(inst.N + 3);
  EXPECT_DOUBLE_EQ(t0.value(x), tn.value(x));
  const double r3 = inst.data.row(3).dot(x) - inst.targets[3];
  EXPECT_DOUBLE_EQ(t3.value(x), r3 * r3);
}

TEST(CyclicLoss, SubgradientMatchesFiniteDifferences) {
  const GenLassoInstance inst = generate_lasso(small_lasso_config(10));
  Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const LossTerm f = inst.cyclic_loss(trial);
    const Eigen::VectorXd x = rng.normal_vector(inst.n);
    const Eigen::VectorXd numeric = oracles::finite_difference_gradient(
        [&](const Eigen::VectorXd& p) { return f.value(p); }, x);
    EXPECT_LT((f.subgradient(x) - numeric).lpNorm<Eigen::Infinity>(), 1e-5);
  }
}

TEST(InstanceIo, RoundTripIsBitStable) {
  const GenLassoInstance inst = generate_lasso(small_lasso_config(12));
  const std::string path1 = "test_io_a.genlasso";
  const std::string path2 = "test_io_b.genlasso";
  save_instance(inst, path1);
  const GenLassoInstance loaded = load_instance(path1);
  EXPECT_EQ(loaded.data, inst.data);
  EXPECT_EQ(loaded.targets, inst.targets);
  EXPECT_EQ(loaded.ground_truth, inst.ground_truth);
  EXPECT_EQ(loaded.lambda, inst.lambda);
  EXPECT_EQ(loaded.kind, inst.kind);
  EXPECT_EQ(loaded.seed, inst.seed);
  save_instance(loaded, path2);
  std::ifstream a(path1), b(path2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  std::filesystem::remove(path1);
  std::filesystem::remove(path2);
}

TEST(InstanceIo, MissingFileThrows) {
  EXPECT_THROW(load_instance("does_not_exist.genlasso"), IoError);
}

TEST(InstanceIo, TvKindSurvivesRoundTrip) {
  DataGenConfig cfg;
  cfg.N = 4;
  cfg.n = 6;
  cfg.segments = 2;
  cfg.seed = 13;
  cfg.kind = ProblemKind::TotalVariation;
  const GenLassoInstance inst = generate_tv(cfg);
  const std::string path = "test_io_tv.genlasso";
  save_instance(inst, path);
  const GenLassoInstance loaded = load_instance(path);
  EXPECT_EQ(loaded.kind, ProblemKind::TotalVariation);
  EXPECT_EQ(loaded.ground_truth, inst.ground_truth);
  std::filesystem::remove(path);
}

TEST(GradientBound, DominatesSampledGradients) {
  const GenLassoInstance inst = generate_lasso(small_lasso_config(14));
  const double radius = 3.0;
  const double bound = estimate_gradient_bound(inst, radius);
  Rng rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x = rng.normal_vector(inst.n);
    x *= rng.uniform(0.0, radius) / x.norm();
    const double gn = inst.cyclic_loss(trial).subgradient(x).norm();
    EXPECT_LE(gn, bound + 1e-12);
  }
}

}  // namespace
}  // namespace oadm
