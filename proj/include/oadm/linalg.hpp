#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace oadm::linalg {

// Arithmetic-operation counter for the structured kernels below. Counts are
// deterministic functions of the input sizes, which is what the linear-cost
// checks rely on.
std::uint64_t flop_count();
void reset_flop_count();

// Entrywise soft threshold: sign(a_i) * max(|a_i| - kappa, 0).
Eigen::VectorXd shrink(const Eigen::VectorXd& a, double kappa);
void shrink_into(const Eigen::VectorXd& a, double kappa, Eigen::VectorXd& out);

// Solves (sigma * I + a a^T) r = v by the Sherman-Morrison identity,
//   r = (v - a * (a.v) / (sigma + a.a)) / sigma,
// in O(n) arithmetic. Requires sigma > 0.
Eigen::VectorXd rank_one_regularized_solve(const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& v,
                                           double sigma);

// Square upper bidiagonal matrix with unit diagonal and -1 superdiagonal:
//   (D x)_i = x_i - x_{i+1}  for i < n,   (D x)_n = x_n.
// Invertible for every n >= 1; D^T D is symmetric tridiagonal.
struct BidiagonalDifference {
  Eigen::Index n = 0;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const;
  // D x = v via back substitution.
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;
  // D^T x = v via forward substitution.
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;

  // Exact spectrum of D^T D (equivalently D D^T):
  //   lambda_j = 2 - 2 cos((2j - 1) pi / (2n + 1)),  j = 1..n.
  double gram_lambda_min() const;
  double gram_lambda_max() const;
};

// (D^T D) x = v without forming the inverse, via a symmetric tridiagonal
// Thomas solve in O(n).
Eigen::VectorXd dtd_solve(const BidiagonalDifference& d, const Eigen::VectorXd& v);
Eigen::VectorXd d_solve(const BidiagonalDifference& d, const Eigen::VectorXd& v);

// Solves T x = rhs for symmetric positive definite tridiagonal T given its
// diagonal and (constant-free) subdiagonal. Thomas algorithm, no pivoting.
Eigen::VectorXd tridiagonal_solve(const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& off,
                                  const Eigen::VectorXd& rhs);

// Reusable buffers for tridiagonal_solve_into in per-round hot loops.
struct TridiagonalWorkspace {
  Eigen::VectorXd c_prime;
  Eigen::VectorXd d_prime;
};

void tridiagonal_solve_into(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                            const Eigen::VectorXd& rhs, TridiagonalWorkspace& ws,
                            Eigen::VectorXd& out);

struct SpectralInfo {
  double lambda_max_BtB = 0.0;
  // Smallest eigenvalue of A A^T; present only when A is declared invertible.
  std::optional<double> lambda_min_AAt;
};

// Largest eigenvalue of B^T B by power iteration from a fixed seeded start
// vector; at least 200 iterations unless the eigen-residual drops below
// 1e-10 relative first.
double largest_gram_eigenvalue(const Eigen::MatrixXd& b);

// Smallest eigenvalue of A A^T for square A. Direct symmetric eigensolve for
// m <= 512, inverse iteration above that. Throws StructureError when A is
// numerically singular.
double smallest_outer_eigenvalue(const Eigen::MatrixXd& a);

SpectralInfo estimate_spectral(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace oadm::linalg
