#pragma once

#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "oadm/linalg.hpp"

namespace oadm {

// One side of the coupling A x + B z = c. Structured kinds keep every apply
// and solve at O(n); the dense kind falls back to Eigen.
class LinearMap {
 public:
  enum class Kind { Identity, NegatedIdentity, BidiagonalDifference, Dense };

  static LinearMap identity(Eigen::Index n);
  static LinearMap negated_identity(Eigen::Index n);
  static LinearMap bidiagonal_difference(Eigen::Index n);
  static LinearMap dense(Eigen::MatrixXd m, bool declared_invertible = false);

  Kind kind() const { return kind_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool invertible() const { return invertible_; }
  bool is_identity() const { return kind_ == Kind::Identity; }
  bool is_negated_identity() const { return kind_ == Kind::NegatedIdentity; }
  bool is_bidiagonal() const { return kind_ == Kind::BidiagonalDifference; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const;

  // Solves M x = rhs; throws CapabilityError unless the map is invertible.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  Eigen::MatrixXd materialize() const;
  // M^T M, materialized (intended for small problems only).
  Eigen::MatrixXd gram() const;

  const linalg::BidiagonalDifference& bidiagonal() const;
  const Eigen::MatrixXd& dense_matrix() const;

 private:
  LinearMap(Kind kind, Eigen::Index rows, Eigen::Index cols, bool invertible)
      : kind_(kind), rows_(rows), cols_(cols), invertible_(invertible) {}

  Kind kind_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  bool invertible_;
  Eigen::MatrixXd mat_;
  linalg::BidiagonalDifference bidiag_{};
  // Lazy LU for dense solves; shared so LinearMap stays copyable.
  mutable std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

// The coupling (A, B, c) of the equality-constrained composite problem,
// with cached spectral quantities. Feasibility of A x + B z = c is assumed.
class ConstraintSpec {
 public:
  ConstraintSpec(LinearMap a, LinearMap b, Eigen::VectorXd c);

  // A = I, B = -I, c = 0: the plain variable-splitting constraint x = z.
  static ConstraintSpec splitting(Eigen::Index n);
  // A = D (bidiagonal difference), B = -I, c = 0: the constraint D x = z.
  static ConstraintSpec difference_splitting(Eigen::Index n);

  const LinearMap& a() const { return a_; }
  const LinearMap& b() const { return b_; }
  const Eigen::VectorXd& c() const { return c_; }
  Eigen::Index m() const { return c_.size(); }
  Eigen::Index n1() const { return a_.cols(); }
  Eigen::Index n2() const { return b_.cols(); }

  // A x + B z - c.
  Eigen::VectorXd residual(const Eigen::VectorXd& x, const Eigen::VectorXd& z) const;

  bool c_is_zero() const { return c_is_zero_; }

  // lambda_max(B^T B) always; lambda_min(A A^T) when A is invertible.
  const linalg::SpectralInfo& spectral() const;

 private:
  LinearMap a_;
  LinearMap b_;
  Eigen::VectorXd c_;
  bool c_is_zero_ = false;
  mutable std::optional<linalg::SpectralInfo> spectral_;
};

}  // namespace oadm
