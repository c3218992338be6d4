#include "oadm/enumerate.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "oadm/error.hpp"

namespace oadm {

namespace {

double objective(const Eigen::MatrixXd& rows, const Eigen::VectorXd& targets,
                 const Eigen::VectorXd& w, double scale, double mu, double lambda,
                 const Eigen::VectorXd& v) {
  const Eigen::VectorXd r = rows * v - targets;
  double val = scale * r.cwiseProduct(w).dot(r);
  val += 0.5 * mu * v.squaredNorm() + lambda * v.lpNorm<1>();
  return val;
}

}  // namespace

EnumerationResult enumerate_l1_least_squares(const Eigen::MatrixXd& rows,
                                             const Eigen::VectorXd& targets,
                                             const Eigen::VectorXd& row_weights,
                                             double scale, double mu, double lambda) {
  const Eigen::Index n = rows.cols();
  if (n > 12) {
    throw ParameterError("enumerate_l1_least_squares: dimension above 12");
  }
  if (rows.rows() != targets.size()) {
    throw ParameterError("enumerate_l1_least_squares: row/target mismatch");
  }
  Eigen::VectorXd w = row_weights.size() > 0
                          ? row_weights
                          : Eigen::VectorXd::Ones(rows.rows());
  if (w.size() != rows.rows()) {
    throw ParameterError("enumerate_l1_least_squares: weight count mismatch");
  }

  // Gram 2*scale*R^T W R + mu I and linear term 2*scale*R^T W b, built once.
  Eigen::MatrixXd gram =
      (2.0 * scale) * (rows.transpose() * w.asDiagonal() * rows);
  gram.diagonal().array() += mu;
  const Eigen::VectorXd lin = (2.0 * scale) * (rows.transpose() * w.cwiseProduct(targets));

  EnumerationResult best;
  best.v = Eigen::VectorXd::Zero(n);
  best.value = objective(rows, targets, w, scale, mu, lambda, best.v);

  std::vector<int> pattern(n, -1);  // ternary counter over {-1, 0, +1}
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= 3;
  std::vector<Eigen::Index> support;
  support.reserve(n);
  for (long code = 1; code < total; ++code) {
    // advance the counter
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pattern[i] < 1) {
        ++pattern[i];
        break;
      }
      pattern[i] = -1;
    }
    support.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pattern[i] != 0) support.push_back(i);
    }
    if (support.empty()) continue;
    const Eigen::Index s = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd gs(s, s);
    Eigen::VectorXd rhs(s);
    for (Eigen::Index a = 0; a < s; ++a) {
      rhs[a] = lin[support[a]] - lambda * pattern[support[a]];
      for (Eigen::Index b = 0; b < s; ++b) gs(a, b) = gram(support[a], support[b]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gs);
    if (ldlt.info() != Eigen::Success) continue;
    const Eigen::VectorXd vs = ldlt.solve(rhs);
    if (!vs.allFinite()) continue;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < s; ++a) v[support[a]] = vs[a];
    const double val = objective(rows, targets, w, scale, mu, lambda, v);
    if (val < best.value) {
      best.value = val;
      best.v = v;
    }
  }
  return best;
}

}  // namespace oadm
