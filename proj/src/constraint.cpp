#include "oadm/constraint.hpp"

#include "oadm/error.hpp"

namespace oadm {

LinearMap LinearMap::identity(Eigen::Index n) {
  return LinearMap(Kind::Identity, n, n, true);
}

LinearMap LinearMap::negated_identity(Eigen::Index n) {
  return LinearMap(Kind::NegatedIdentity, n, n, true);
}

LinearMap LinearMap::bidiagonal_difference(Eigen::Index n) {
  LinearMap m(Kind::BidiagonalDifference, n, n, true);
  m.bidiag_.n = n;
  return m;
}

LinearMap LinearMap::dense(Eigen::MatrixXd mat, bool declared_invertible) {
  if (declared_invertible && mat.rows() != mat.cols()) {
    throw ParameterError("LinearMap::dense: only square maps can be invertible");
  }
  LinearMap m(Kind::Dense, mat.rows(), mat.cols(), declared_invertible);
  m.mat_ = std::move(mat);
  return m;
}

Eigen::VectorXd LinearMap::apply(const Eigen::VectorXd& v) const {
  if (v.size() != cols_) throw ParameterError("LinearMap::apply: size mismatch");
  switch (kind_) {
    case Kind::Identity:
      return v;
    case Kind::NegatedIdentity:
      return -v;
    case Kind::BidiagonalDifference:
      return bidiag_.apply(v);
    case Kind::Dense:
      return mat_ * v;
  }
  return v;
}

Eigen::VectorXd LinearMap::apply_transpose(const Eigen::VectorXd& v) const {
  if (v.size() != rows_) throw ParameterError("LinearMap::apply_transpose: size mismatch");
  switch (kind_) {
    case Kind::Identity:
      return v;
    case Kind::NegatedIdentity:
      return -v;
    case Kind::BidiagonalDifference:
      return bidiag_.apply_transpose(v);
    case Kind::Dense:
      return mat_.transpose() * v;
  }
  return v;
}

Eigen::VectorXd LinearMap::solve(const Eigen::VectorXd& rhs) const {
  if (!invertible_) {
    throw CapabilityError("LinearMap::solve: map is not declared invertible");
  }
  if (rhs.size() != rows_) throw ParameterError("LinearMap::solve: size mismatch");
  switch (kind_) {
    case Kind::Identity:
      return rhs;
    case Kind::NegatedIdentity:
      return -rhs;
    case Kind::BidiagonalDifference:
      return bidiag_.solve(rhs);
    case Kind::Dense:
      if (!lu_) lu_ = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(mat_);
      return lu_->solve(rhs);
  }
  return rhs;
}

Eigen::MatrixXd LinearMap::materialize() const {
  switch (kind_) {
    case Kind::Identity:
      return Eigen::MatrixXd::Identity(rows_, cols_);
    case Kind::NegatedIdentity:
      return -Eigen::MatrixXd::Identity(rows_, cols_);
    case Kind::BidiagonalDifference:
      return bidiag_.dense();
    case Kind::Dense:
      return mat_;
  }
  return mat_;
}

Eigen::MatrixXd LinearMap::gram() const {
  switch (kind_) {
    case Kind::Identity:
    case Kind::NegatedIdentity:
      return Eigen::MatrixXd::Identity(cols_, cols_);
    case Kind::BidiagonalDifference: {
      const Eigen::MatrixXd d = bidiag_.dense();
      return d.transpose() * d;
    }
    case Kind::Dense:
      return mat_.transpose() * mat_;
  }
  return Eigen::MatrixXd();
}

const linalg::BidiagonalDifference& LinearMap::bidiagonal() const {
  if (kind_ != Kind::BidiagonalDifference) {
    throw UsageError("LinearMap::bidiagonal: not a bidiagonal map");
  }
  return bidiag_;
}

const Eigen::MatrixXd& LinearMap::dense_matrix() const {
  if (kind_ != Kind::Dense) throw UsageError("LinearMap::dense_matrix: not dense");
  return mat_;
}

ConstraintSpec::ConstraintSpec(LinearMap a, LinearMap b, Eigen::VectorXd c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (a_.rows() != b_.rows() || a_.rows() != c_.size()) {
    throw ParameterError("ConstraintSpec: row dimensions of A, B, c must agree");
  }
  c_is_zero_ = c_.size() == 0 || c_.lpNorm<Eigen::Infinity>() == 0.0;
}

ConstraintSpec ConstraintSpec::splitting(Eigen::Index n) {
  return ConstraintSpec(LinearMap::identity(n), LinearMap::negated_identity(n),
                        Eigen::VectorXd::Zero(n));
}

ConstraintSpec ConstraintSpec::difference_splitting(Eigen::Index n) {
  return ConstraintSpec(LinearMap::bidiagonal_difference(n),
                        LinearMap::negated_identity(n), Eigen::VectorXd::Zero(n));
}

Eigen::VectorXd ConstraintSpec::residual(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& z) const {
  return a_.apply(x) + b_.apply(z) - c_;
}

const linalg::SpectralInfo& ConstraintSpec::spectral() const {
  if (!spectral_) {
    linalg::SpectralInfo info;
    switch (b_.kind()) {
      case LinearMap::Kind::Identity:
      case LinearMap::Kind::NegatedIdentity:
        info.lambda_max_BtB = 1.0;
        break;
      case LinearMap::Kind::BidiagonalDifference:
        info.lambda_max_BtB = b_.bidiagonal().gram_lambda_max();
        break;
      case LinearMap::Kind::Dense:
        info.lambda_max_BtB = linalg::largest_gram_eigenvalue(b_.dense_matrix());
        break;
    }
    if (a_.invertible()) {
      switch (a_.kind()) {
        case LinearMap::Kind::Identity:
        case LinearMap::Kind::NegatedIdentity:
          info.lambda_min_AAt = 1.0;
          break;
        case LinearMap::Kind::BidiagonalDifference:
          info.lambda_min_AAt = a_.bidiagonal().gram_lambda_min();
          break;
        case LinearMap::Kind::Dense:
          info.lambda_min_AAt = linalg::smallest_outer_eigenvalue(a_.dense_matrix());
          break;
      }
    }
    spectral_ = info;
  }
  return *spectral_;
}

}  // namespace oadm
