#pragma once

#include <Eigen/Dense>

namespace oadm {

struct EnumerationResult {
  Eigen::VectorXd v;
  double value = 0.0;
};

// Exact global minimizer of the l1-regularized weighted least squares
//   scale * sum_i w_i (rows_i . v - targets_i)^2 + (mu/2)||v||^2 + lambda||v||_1
// found by exhausting all 3^n support/sign patterns and solving each
// restricted stationarity system. The true optimum's own pattern yields the
// optimum exactly, so the candidate with the smallest objective is the
// global one. Dimensions above 12 are rejected.
EnumerationResult enumerate_l1_least_squares(const Eigen::MatrixXd& rows,
                                             const Eigen::VectorXd& targets,
                                             const Eigen::VectorXd& row_weights,
                                             double scale, double mu, double lambda);

}  // namespace oadm
