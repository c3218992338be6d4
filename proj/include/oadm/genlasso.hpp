#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "oadm/constraint.hpp"
#include "oadm/loss.hpp"

namespace oadm {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ProblemKind { Lasso, TotalVariation };

struct DataGenConfig {
  long N = 100;
  long n = 1000;
  long k = 100;        // nonzero count (lasso)
  long segments = 3;   // piecewise-constant segment count (total variation)
  double noise_sigma = 0.1;
  double q = 0.5;      // lambda = q * ||A^T b / N||_inf unless overridden
  std::optional<double> lambda_override;
  std::uint64_t seed = 0;
  ProblemKind kind = ProblemKind::Lasso;
};

// A generated or loaded problem instance:
//   min_x (1/N) sum_t (a_t . x - b_t)^2 + lambda ||D x||_1
// with D = I (lasso) or the bidiagonal difference matrix (total variation).
// Columns of the data matrix are unit-normalized; targets carry the 1/N
// scaling of the generator recipe. Instances are immutable after
// construction and safe to share across concurrent solver runs.
struct GenLassoInstance {
  ProblemKind kind = ProblemKind::Lasso;
  long N = 0;
  long n = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  RowMatrixXd data;              // N x n, unit columns
  Eigen::VectorXd targets;       // length N
  Eigen::VectorXd ground_truth;  // x0, length n

  double objective(const Eigen::VectorXd& x) const;

  // The least-squares term for data row (t mod N), optionally with an added
  // (tikhonov/2)||x||^2 curvature term.
  LossTerm cyclic_loss(long t, double tikhonov = 0.0) const;

  // The splitting constraint matching the kind: x = z or D x = z.
  ConstraintSpec constraint() const;
  Regularizer regularizer(double extra_strong_convexity = 0.0) const;

  // The whole-dataset loss (1/N)||data x - targets||^2 (+ tikhonov ridge).
  LossTerm batch_loss(double tikhonov = 0.0) const;
};

GenLassoInstance generate_lasso(const DataGenConfig& cfg);
GenLassoInstance generate_tv(const DataGenConfig& cfg);
GenLassoInstance generate(const DataGenConfig& cfg);

void save_instance(const GenLassoInstance& inst, const std::string& path);
GenLassoInstance load_instance(const std::string& path);

// Cycles through the instance rows, one least-squares term per round. Terms
// are materialized once at construction; handing one out is O(1).
class CyclicLossStream : public LossStream {
 public:
  explicit CyclicLossStream(const GenLassoInstance& inst, double tikhonov = 0.0)
      : inst_(&inst), tikhonov_(tikhonov) {
    terms_.reserve(inst.N);
    for (long i = 0; i < inst.N; ++i) terms_.push_back(inst.cyclic_loss(i, tikhonov));
  }
  LossTerm term(long t) const override { return terms_[t % inst_->N]; }
  Eigen::Index dim() const override { return inst_->n; }
  const GenLassoInstance& instance() const { return *inst_; }
  double tikhonov() const { return tikhonov_; }

 private:
  const GenLassoInstance* inst_;
  double tikhonov_;
  std::vector<LossTerm> terms_;
};

// sup-norm bound on the subgradient of any cyclic term over the ball
// ||x||_2 <= radius: max_t [ 2 ||a_t|| (||a_t|| R + |b_t|) ] + tikhonov R.
double estimate_gradient_bound(const GenLassoInstance& inst, double radius,
                               double tikhonov = 0.0);

}  // namespace oadm
