#include "oadm/loss.hpp"

#include <cmath>

#include "oadm/error.hpp"
#include "oadm/linalg.hpp"

namespace oadm {

LossTerm LossTerm::zero(Eigen::Index n) { return LossTerm(Kind::Zero, n); }

LossTerm LossTerm::least_squares_row(Eigen::VectorXd a, double target,
                                     double weight, double tikhonov) {
  if (weight < 0.0 || tikhonov < 0.0) {
    throw ParameterError("least_squares_row: weight and tikhonov must be >= 0");
  }
  LossTerm t(Kind::LeastSquaresRow, a.size());
  t.row_ = std::make_shared<const Eigen::VectorXd>(std::move(a));
  t.target_ = target;
  t.weight_ = weight;
  t.tikhonov_ = tikhonov;
  return t;
}

LossTerm LossTerm::least_squares_batch(Eigen::MatrixXd rows, Eigen::VectorXd targets,
                                       double scale, double tikhonov,
                                       Eigen::VectorXd row_weights) {
  if (rows.rows() != targets.size()) {
    throw ParameterError("least_squares_batch: row/target count mismatch");
  }
  if (row_weights.size() != 0 && row_weights.size() != rows.rows()) {
    throw ParameterError("least_squares_batch: weight count mismatch");
  }
  if (scale < 0.0 || tikhonov < 0.0) {
    throw ParameterError("least_squares_batch: scale and tikhonov must be >= 0");
  }
  LossTerm t(Kind::LeastSquaresBatch, rows.cols());
  t.batch_rows_ = std::make_shared<const Eigen::MatrixXd>(std::move(rows));
  t.batch_targets_ = std::make_shared<const Eigen::VectorXd>(std::move(targets));
  t.batch_weights_ = std::make_shared<const Eigen::VectorXd>(std::move(row_weights));
  t.batch_scale_ = scale;
  t.tikhonov_ = tikhonov;
  return t;
}

LossTerm LossTerm::custom(Eigen::Index n, EvalFn eval, GradFn subgradient,
                          XSolveFn x_update_solver) {
  LossTerm t(Kind::Custom, n);
  t.eval_ = std::move(eval);
  t.grad_ = std::move(subgradient);
  t.x_solver_ = std::move(x_update_solver);
  return t;
}

double LossTerm::value(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::LeastSquaresRow: {
      const double r = row_->dot(x) - target_;
      double v = weight_ * r * r;
      if (tikhonov_ > 0.0) v += 0.5 * tikhonov_ * x.squaredNorm();
      return v;
    }
    case Kind::LeastSquaresBatch: {
      Eigen::VectorXd r = *batch_rows_ * x - *batch_targets_;
      double v;
      if (has_batch_weights()) {
        v = batch_scale_ * r.cwiseProduct(*batch_weights_).dot(r);
      } else {
        v = batch_scale_ * r.squaredNorm();
      }
      if (tikhonov_ > 0.0) v += 0.5 * tikhonov_ * x.squaredNorm();
      return v;
    }
    case Kind::Custom:
      return eval_(x);
  }
  return 0.0;
}

Eigen::VectorXd LossTerm::subgradient(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case Kind::Zero:
      return Eigen::VectorXd::Zero(n_);
    case Kind::LeastSquaresRow: {
      const double r = row_->dot(x) - target_;
      Eigen::VectorXd g = (2.0 * weight_ * r) * (*row_);
      if (tikhonov_ > 0.0) g += tikhonov_ * x;
      return g;
    }
    case Kind::LeastSquaresBatch: {
      Eigen::VectorXd r = *batch_rows_ * x - *batch_targets_;
      if (has_batch_weights()) r = r.cwiseProduct(*batch_weights_);
      Eigen::VectorXd g = (2.0 * batch_scale_) * (batch_rows_->transpose() * r);
      if (tikhonov_ > 0.0) g += tikhonov_ * x;
      return g;
    }
    case Kind::Custom:
      return grad_(x);
  }
  return Eigen::VectorXd::Zero(n_);
}

Eigen::VectorXd LossTerm::run_x_update_solver(const XUpdateContext& ctx) const {
  if (!x_solver_) {
    throw CapabilityError("LossTerm: no x-update solver for this custom loss");
  }
  return x_solver_(ctx);
}

Regularizer Regularizer::zero() { return Regularizer(Kind::Zero); }

Regularizer Regularizer::l1(double lambda, double strong_convexity) {
  if (lambda < 0.0 || strong_convexity < 0.0) {
    throw ParameterError("Regularizer::l1: lambda and strong_convexity must be >= 0");
  }
  Regularizer g(Kind::L1);
  g.lambda_ = lambda;
  g.strong_convexity_ = strong_convexity;
  return g;
}

Regularizer Regularizer::box(double lo, double hi) {
  if (!(lo <= 0.0 && 0.0 <= hi)) {
    throw ParameterError("Regularizer::box: box must contain the origin");
  }
  Regularizer g(Kind::Box);
  g.box_lo_ = lo;
  g.box_hi_ = hi;
  return g;
}

Regularizer Regularizer::ball(double radius) {
  if (!(radius > 0.0)) throw ParameterError("Regularizer::ball: radius must be > 0");
  Regularizer g(Kind::Ball);
  g.ball_radius_ = radius;
  return g;
}

Regularizer Regularizer::custom(EvalFn eval, ProxFn prox, double strong_convexity) {
  Regularizer g(Kind::Custom);
  g.eval_ = std::move(eval);
  g.prox_ = std::move(prox);
  g.strong_convexity_ = strong_convexity;
  return g;
}

double Regularizer::value(const Eigen::VectorXd& z) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::L1: {
      double v = lambda_ * z.lpNorm<1>();
      if (strong_convexity_ > 0.0) v += 0.5 * strong_convexity_ * z.squaredNorm();
      return v;
    }
    case Kind::Box: {
      const double tol = 1e-9 * (1.0 + z.lpNorm<Eigen::Infinity>());
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z[i] < box_lo_ - tol || z[i] > box_hi_ + tol) {
          return std::numeric_limits<double>::infinity();
        }
      }
      return 0.0;
    }
    case Kind::Ball: {
      const double tol = 1e-9 * (1.0 + ball_radius_);
      return z.norm() <= ball_radius_ + tol
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
    }
    case Kind::Custom:
      return eval_(z);
  }
  return 0.0;
}

Eigen::VectorXd Regularizer::prox(const Eigen::VectorXd& v, double penalty) const {
  if (!(penalty > 0.0)) {
    throw ParameterError("Regularizer::prox: penalty must be > 0");
  }
  switch (kind_) {
    case Kind::Zero:
      return v;
    case Kind::L1: {
      // argmin lambda||z||_1 + (sc/2)||z||^2 + (p/2)||z - v||^2
      //   = shrink(p v, lambda) / (p + sc)
      Eigen::VectorXd out = linalg::shrink(penalty * v, lambda_);
      out /= (penalty + strong_convexity_);
      return out;
    }
    case Kind::Box:
    case Kind::Ball:
      return project(v);
    case Kind::Custom:
      return prox_(v, penalty);
  }
  return v;
}

Eigen::VectorXd Regularizer::project(const Eigen::VectorXd& v) const {
  switch (kind_) {
    case Kind::Box:
      return v.cwiseMax(box_lo_).cwiseMin(box_hi_);
    case Kind::Ball: {
      const double norm = v.norm();
      if (norm <= ball_radius_) return v;
      return v * (ball_radius_ / norm);
    }
    default:
      throw UsageError("Regularizer::project: not an indicator regularizer");
  }
}

Eigen::VectorXd Regularizer::minimizer(Eigen::Index n) const {
  return Eigen::VectorXd::Zero(n);
}

}  // namespace oadm
