#pragma once

#include <functional>
#include <limits>
#include <memory>

#include <Eigen/Dense>

#include "oadm/constraint.hpp"

namespace oadm {

class LossTerm;

// Everything the x-subproblem solver sees besides the loss itself.
struct XUpdateContext {
  const ConstraintSpec& cons;
  const Eigen::VectorXd& z;
  const Eigen::VectorXd& y;
  double rho;
  double eta;
  const Eigen::VectorXd& anchor;  // proximal center x_t
};

// One convex loss term f_t. The quadratic kinds carry enough structure for
// closed-form x-updates; Custom needs a user-supplied subproblem solver.
class LossTerm {
 public:
  enum class Kind { Zero, LeastSquaresRow, LeastSquaresBatch, Custom };

  using EvalFn = std::function<double(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using XSolveFn = std::function<Eigen::VectorXd(const XUpdateContext&)>;

  static LossTerm zero(Eigen::Index n);

  // f(x) = weight * (a.x - target)^2 + (tikhonov / 2) * ||x||^2
  static LossTerm least_squares_row(Eigen::VectorXd a, double target,
                                    double weight = 1.0, double tikhonov = 0.0);

  // f(x) = scale * sum_i w_i (rows_i . x - targets_i)^2 + (tikhonov/2)||x||^2,
  // with w = 1 when row_weights is empty.
  static LossTerm least_squares_batch(Eigen::MatrixXd rows, Eigen::VectorXd targets,
                                      double scale, double tikhonov = 0.0,
                                      Eigen::VectorXd row_weights = Eigen::VectorXd());

  static LossTerm custom(Eigen::Index n, EvalFn eval, GradFn subgradient,
                         XSolveFn x_update_solver = nullptr);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return n_; }

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const;

  // Quadratic-structure accessors (valid for the matching kind). The payload
  // is shared, so copying a term is O(1); streams hand out terms per round.
  const Eigen::VectorXd& row() const { return *row_; }
  double target() const { return target_; }
  double weight() const { return weight_; }
  double tikhonov() const { return tikhonov_; }
  const Eigen::MatrixXd& batch_rows() const { return *batch_rows_; }
  const Eigen::VectorXd& batch_targets() const { return *batch_targets_; }
  const Eigen::VectorXd& batch_weights() const { return *batch_weights_; }
  bool has_batch_weights() const {
    return batch_weights_ && batch_weights_->size() > 0;
  }
  double batch_scale() const { return batch_scale_; }
  bool has_x_update_solver() const { return static_cast<bool>(x_solver_); }
  Eigen::VectorXd run_x_update_solver(const XUpdateContext& ctx) const;

 private:
  LossTerm(Kind kind, Eigen::Index n) : kind_(kind), n_(n) {}

  Kind kind_;
  Eigen::Index n_;
  std::shared_ptr<const Eigen::VectorXd> row_;
  double target_ = 0.0;
  double weight_ = 0.0;
  double tikhonov_ = 0.0;
  std::shared_ptr<const Eigen::MatrixXd> batch_rows_;
  std::shared_ptr<const Eigen::VectorXd> batch_targets_;
  std::shared_ptr<const Eigen::VectorXd> batch_weights_;
  double batch_scale_ = 0.0;
  EvalFn eval_;
  GradFn grad_;
  XSolveFn x_solver_;
};

// The fixed regularizer g. Kinds with closed-form proximal maps cover the
// shipped problems; Custom takes user eval/prox callables.
// Construction enforces g(0) = 0 and g >= 0.
class Regularizer {
 public:
  enum class Kind { Zero, L1, Box, Ball, Custom };

  using EvalFn = std::function<double(const Eigen::VectorXd&)>;
  using ProxFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

  static Regularizer zero();
  // g(z) = lambda ||z||_1 + (strong_convexity / 2) ||z||^2
  static Regularizer l1(double lambda, double strong_convexity = 0.0);
  // Indicator of the box [lo, hi]^n; must contain the origin.
  static Regularizer box(double lo, double hi);
  // Indicator of the Euclidean ball of the given radius.
  static Regularizer ball(double radius);
  static Regularizer custom(EvalFn eval, ProxFn prox, double strong_convexity = 0.0);

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double strong_convexity() const { return strong_convexity_; }
  bool is_indicator() const { return kind_ == Kind::Box || kind_ == Kind::Ball; }

  double value(const Eigen::VectorXd& z) const;
  // argmin_z g(z) + (penalty / 2) ||z - v||^2, penalty > 0.
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double penalty) const;
  // Euclidean projection; only meaningful for indicator kinds.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  // A global minimizer of g. The origin, by the g(0) = 0, g >= 0 contract.
  Eigen::VectorXd minimizer(Eigen::Index n) const;

 private:
  explicit Regularizer(Kind kind) : kind_(kind) {}

  Kind kind_;
  double lambda_ = 0.0;
  double strong_convexity_ = 0.0;
  double box_lo_ = 0.0;
  double box_hi_ = 0.0;
  double ball_radius_ = 0.0;
  EvalFn eval_;
  ProxFn prox_;
};

// Constants the step-size schedules and regret certificates treat as known:
// subgradient bound G_f, comparator radii D_x (Bregman) and D_z, dual radius
// D_y, Bregman modulus alpha, strong-convexity moduli, and the lower-bound
// constant F of the per-round loss deficit.
struct AssumptionBundle {
  double g_f = 0.0;
  double d_x = 0.0;
  double d_z = 0.0;
  double d_y = 0.0;
  double alpha = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double f_bound = 0.0;
};

// A sequence of loss terms revealed one per round.
class LossStream {
 public:
  virtual ~LossStream() = default;
  virtual LossTerm term(long t) const = 0;
  virtual Eigen::Index dim() const = 0;
};

// The same term every round (the batch setting).
class FixedLossStream : public LossStream {
 public:
  explicit FixedLossStream(LossTerm term) : term_(std::move(term)) {}
  LossTerm term(long) const override { return term_; }
  Eigen::Index dim() const override { return term_.dim(); }

 private:
  LossTerm term_;
};

class CallbackLossStream : public LossStream {
 public:
  CallbackLossStream(Eigen::Index n, std::function<LossTerm(long)> fn)
      : n_(n), fn_(std::move(fn)) {}
  LossTerm term(long t) const override { return fn_(t); }
  Eigen::Index dim() const override { return n_; }

 private:
  Eigen::Index n_;
  std::function<LossTerm(long)> fn_;
};

}  // namespace oadm
