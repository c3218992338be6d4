#include "oadm/linalg.hpp"

#include <cmath>

#include "oadm/error.hpp"
#include "oadm/rng.hpp"

namespace oadm::linalg {

namespace {
thread_local std::uint64_t g_flops = 0;
}

std::uint64_t flop_count() { return g_flops; }
void reset_flop_count() { g_flops = 0; }

void shrink_into(const Eigen::VectorXd& a, double kappa, Eigen::VectorXd& out) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ParameterError("shrink: threshold must be finite and non-negative");
  }
  const Eigen::Index n = a.size();
  out.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(a[i]) - kappa;
    out[i] = m > 0.0 ? (a[i] > 0.0 ? m : -m) : 0.0;
  }
  g_flops += static_cast<std::uint64_t>(2 * n);
}

Eigen::VectorXd shrink(const Eigen::VectorXd& a, double kappa) {
  Eigen::VectorXd out;
  shrink_into(a, kappa, out);
  return out;
}

Eigen::VectorXd rank_one_regularized_solve(const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& v,
                                           double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("rank_one_regularized_solve: sigma must be positive");
  }
  if (a.size() != v.size()) {
    throw ParameterError("rank_one_regularized_solve: size mismatch");
  }
  const double denom = sigma + a.squaredNorm();
  const double coef = a.dot(v) / denom;
  g_flops += static_cast<std::uint64_t>(7 * a.size() + 4);
  return (v - coef * a) / sigma;
}

Eigen::VectorXd BidiagonalDifference::apply(const Eigen::VectorXd& x) const {
  if (x.size() != n) throw ParameterError("BidiagonalDifference::apply: size mismatch");
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) out[i] = x[i] - x[i + 1];
  out[n - 1] = x[n - 1];
  g_flops += static_cast<std::uint64_t>(n);
  return out;
}

Eigen::VectorXd BidiagonalDifference::apply_transpose(const Eigen::VectorXd& v) const {
  if (v.size() != n) throw ParameterError("BidiagonalDifference::apply_transpose: size mismatch");
  Eigen::VectorXd out(n);
  out[0] = v[0];
  for (Eigen::Index i = 1; i < n; ++i) out[i] = v[i] - v[i - 1];
  g_flops += static_cast<std::uint64_t>(n);
  return out;
}

Eigen::VectorXd BidiagonalDifference::solve(const Eigen::VectorXd& v) const {
  if (v.size() != n) throw ParameterError("BidiagonalDifference::solve: size mismatch");
  Eigen::VectorXd x(n);
  x[n - 1] = v[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = v[i] + x[i + 1];
  g_flops += static_cast<std::uint64_t>(n);
  return x;
}

Eigen::VectorXd BidiagonalDifference::solve_transpose(const Eigen::VectorXd& v) const {
  if (v.size() != n) throw ParameterError("BidiagonalDifference::solve_transpose: size mismatch");
  Eigen::VectorXd x(n);
  x[0] = v[0];
  for (Eigen::Index i = 1; i < n; ++i) x[i] = v[i] + x[i - 1];
  g_flops += static_cast<std::uint64_t>(n);
  return x;
}

Eigen::MatrixXd BidiagonalDifference::dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) d(i, i + 1) = -1.0;
  return d;
}

double BidiagonalDifference::gram_lambda_min() const {
  return 2.0 - 2.0 * std::cos(M_PI / static_cast<double>(2 * n + 1));
}

double BidiagonalDifference::gram_lambda_max() const {
  return 2.0 - 2.0 * std::cos(static_cast<double>(2 * n - 1) * M_PI /
                              static_cast<double>(2 * n + 1));
}

void tridiagonal_solve_into(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                            const Eigen::VectorXd& rhs, TridiagonalWorkspace& ws,
                            Eigen::VectorXd& out) {
  const Eigen::Index n = diag.size();
  if (off.size() != n - 1 || rhs.size() != n) {
    throw ParameterError("tridiagonal_solve: size mismatch");
  }
  ws.c_prime.resize(n);
  ws.d_prime.resize(n);
  out.resize(n);
  ws.c_prime[0] = n > 1 ? off[0] / diag[0] : 0.0;
  ws.d_prime[0] = rhs[0] / diag[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const double denom = diag[i] - off[i - 1] * ws.c_prime[i - 1];
    ws.c_prime[i] = i + 1 < n ? off[i] / denom : 0.0;
    ws.d_prime[i] = (rhs[i] - off[i - 1] * ws.d_prime[i - 1]) / denom;
  }
  out[n - 1] = ws.d_prime[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    out[i] = ws.d_prime[i] - ws.c_prime[i] * out[i + 1];
  }
  g_flops += static_cast<std::uint64_t>(8 * n);
}

Eigen::VectorXd tridiagonal_solve(const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& off,
                                  const Eigen::VectorXd& rhs) {
  TridiagonalWorkspace ws;
  Eigen::VectorXd out;
  tridiagonal_solve_into(diag, off, rhs, ws, out);
  return out;
}

Eigen::VectorXd dtd_solve(const BidiagonalDifference& d, const Eigen::VectorXd& v) {
  if (v.size() != d.n) throw ParameterError("dtd_solve: size mismatch");
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(d.n, 2.0);
  diag[0] = 1.0;
  Eigen::VectorXd off = Eigen::VectorXd::Constant(d.n > 1 ? d.n - 1 : 0, -1.0);
  return tridiagonal_solve(diag, off, v);
}

Eigen::VectorXd d_solve(const BidiagonalDifference& d, const Eigen::VectorXd& v) {
  return d.solve(v);
}

double largest_gram_eigenvalue(const Eigen::MatrixXd& b) {
  if (b.size() == 0) throw ParameterError("largest_gram_eigenvalue: empty matrix");
  const Eigen::Index n = b.cols();
  Rng rng(0x5eed);
  Eigen::VectorXd v = rng.normal_vector(n);
  v.normalize();
  double lambda = 0.0;
  const int min_iters = 200;
  const int max_iters = 20000;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = b.transpose() * (b * v);
    lambda = v.dot(w);
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;  // B^T B v = 0 from a random start: B = 0
    const double resid = (w - lambda * v).norm();
    v = w / wnorm;
    if (it + 1 >= min_iters && resid <= 1e-10 * std::max(1.0, std::abs(lambda))) {
      break;
    }
  }
  return lambda;
}

double smallest_outer_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw StructureError("smallest_outer_eigenvalue: matrix must be square");
  }
  const Eigen::Index m = a.rows();
  const Eigen::MatrixXd aat = a * a.transpose();
  double lo = 0.0;
  double hi = 0.0;
  if (m <= 512) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(aat);
    lo = es.eigenvalues()(0);
    hi = es.eigenvalues()(m - 1);
  } else {
    hi = largest_gram_eigenvalue(a.transpose());  // lambda_max(A A^T)
    Eigen::LDLT<Eigen::MatrixXd> ldlt(aat);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw StructureError("smallest_outer_eigenvalue: matrix is singular");
    }
    Rng rng(0x5eed);
    Eigen::VectorXd v = rng.normal_vector(m);
    v.normalize();
    double mu = 0.0;
    for (int it = 0; it < 20000; ++it) {
      Eigen::VectorXd w = ldlt.solve(v);
      mu = v.dot(w);
      const double wnorm = w.norm();
      if (wnorm == 0.0) break;
      const double resid = (w - mu * v).norm();
      v = w / wnorm;
      if (it + 1 >= 200 && resid <= 1e-10 * std::max(1.0, std::abs(mu))) break;
    }
    lo = mu > 0.0 ? 1.0 / mu : 0.0;
  }
  if (!(lo > 1e-12 * std::max(1.0, hi))) {
    throw StructureError("smallest_outer_eigenvalue: matrix is singular");
  }
  return lo;
}

SpectralInfo estimate_spectral(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  SpectralInfo info;
  info.lambda_max_BtB = largest_gram_eigenvalue(b);
  info.lambda_min_AAt = smallest_outer_eigenvalue(a);
  return info;
}

}  // namespace oadm::linalg
