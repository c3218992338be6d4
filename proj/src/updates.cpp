#include "oadm/updates.hpp"

#include <cmath>

#include "oadm/error.hpp"
#include "oadm/linalg.hpp"

namespace oadm {

namespace {

// Min-norm solution of (2 w a a^T) x = rhs. Only consistent right-hand sides
// are accepted; this is the rho = eta = 0 corner of the time-varying
// schedules, where rhs is a multiple of a.
Eigen::VectorXd rank_one_min_norm(const Eigen::VectorXd& a, double two_w,
                                  const Eigen::VectorXd& rhs) {
  const double a2 = a.squaredNorm();
  if (a2 == 0.0 || two_w == 0.0) {
    if (rhs.lpNorm<Eigen::Infinity>() > 0.0) {
      throw CapabilityError("x-update: singular subproblem with inconsistent rhs");
    }
    return Eigen::VectorXd::Zero(a.size());
  }
  const double scale = a.dot(rhs) / (two_w * a2 * a2);
  Eigen::VectorXd x = scale * a;
  const double incons = (rhs - (two_w * a.dot(x)) * a).norm();
  if (incons > 1e-9 * (1.0 + rhs.norm())) {
    throw CapabilityError("x-update: singular subproblem with inconsistent rhs");
  }
  return x;
}

Eigen::MatrixXd loss_hessian(const LossTerm& f) {
  const Eigen::Index n = f.dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  switch (f.kind()) {
    case LossTerm::Kind::Zero:
      break;
    case LossTerm::Kind::LeastSquaresRow:
      h = (2.0 * f.weight()) * (f.row() * f.row().transpose());
      break;
    case LossTerm::Kind::LeastSquaresBatch: {
      const Eigen::MatrixXd& rows = f.batch_rows();
      if (f.has_batch_weights()) {
        h = (2.0 * f.batch_scale()) *
            (rows.transpose() * f.batch_weights().asDiagonal() * rows);
      } else {
        h = (2.0 * f.batch_scale()) * (rows.transpose() * rows);
      }
      break;
    }
    case LossTerm::Kind::Custom:
      throw CapabilityError("x-update: custom loss has no quadratic structure");
  }
  if (f.tikhonov() > 0.0) h.diagonal().array() += f.tikhonov();
  return h;
}

// The constant part of the gradient of f: grad f(x) = H x + q.
Eigen::VectorXd loss_linear_term(const LossTerm& f) {
  switch (f.kind()) {
    case LossTerm::Kind::Zero:
      return Eigen::VectorXd::Zero(f.dim());
    case LossTerm::Kind::LeastSquaresRow:
      return (-2.0 * f.weight() * f.target()) * f.row();
    case LossTerm::Kind::LeastSquaresBatch: {
      Eigen::VectorXd wb = f.batch_targets();
      if (f.has_batch_weights()) wb = wb.cwiseProduct(f.batch_weights());
      return (-2.0 * f.batch_scale()) * (f.batch_rows().transpose() * wb);
    }
    case LossTerm::Kind::Custom:
      throw CapabilityError("x-update: custom loss has no quadratic structure");
  }
  return Eigen::VectorXd();
}

}  // namespace

Eigen::VectorXd solve_x_update(const LossTerm& f, const XUpdateContext& ctx,
                               XUpdateCache* cache) {
  if (f.kind() == LossTerm::Kind::Custom) {
    return f.run_x_update_solver(ctx);
  }
  const ConstraintSpec& cons = ctx.cons;
  const LinearMap& a_map = cons.a();
  const Eigen::Index n = cons.n1();
  if (f.dim() != n) throw ParameterError("x-update: loss dimension mismatch");

  // Stationarity: (H_f + rho A^T A + eta I) x = eta*anchor - A^T(y + rho(Bz - c)) - q_f
  Eigen::VectorXd coupling = ctx.y;
  if (ctx.rho != 0.0) coupling += ctx.rho * (cons.b().apply(ctx.z) - cons.c());
  Eigen::VectorXd rhs = -a_map.apply_transpose(coupling) - loss_linear_term(f);
  if (ctx.eta != 0.0) rhs += ctx.eta * ctx.anchor;

  const double sigma0 = f.tikhonov() + ctx.eta;  // identity-shift part outside A^T A

  switch (a_map.kind()) {
    case LinearMap::Kind::Identity:
    case LinearMap::Kind::NegatedIdentity: {
      const double sigma = sigma0 + ctx.rho;
      if (f.kind() == LossTerm::Kind::LeastSquaresRow && f.weight() > 0.0) {
        const Eigen::VectorXd& a = f.row();
        const double two_w = 2.0 * f.weight();
        if (sigma > 0.0) {
          // (sigma I + 2w a a^T) x = rhs
          const double denom = sigma + two_w * a.squaredNorm();
          const double coef = two_w * a.dot(rhs) / denom;
          return (rhs - coef * a) / sigma;
        }
        return rank_one_min_norm(a, two_w, rhs);
      }
      if (f.kind() == LossTerm::Kind::Zero ||
          (f.kind() == LossTerm::Kind::LeastSquaresRow && f.weight() == 0.0)) {
        if (sigma > 0.0) return rhs / sigma;
        if (rhs.lpNorm<Eigen::Infinity>() > 0.0) {
          throw CapabilityError("x-update: unbounded subproblem");
        }
        return ctx.anchor;
      }
      break;  // batch: dense path below
    }
    case LinearMap::Kind::BidiagonalDifference: {
      if (f.kind() == LossTerm::Kind::LeastSquaresBatch) break;  // dense path
      const Eigen::Index dn = n;
      if (ctx.rho == 0.0 && sigma0 == 0.0) {
        if (f.kind() == LossTerm::Kind::LeastSquaresRow && f.weight() > 0.0) {
          return rank_one_min_norm(f.row(), 2.0 * f.weight(), rhs);
        }
        if (rhs.lpNorm<Eigen::Infinity>() > 0.0) {
          throw CapabilityError("x-update: unbounded subproblem");
        }
        return ctx.anchor;
      }
      // Base matrix rho D^T D + sigma0 I is tridiagonal; Sherman-Morrison
      // handles the rank-one data term on top.
      Eigen::VectorXd diag = Eigen::VectorXd::Constant(dn, 2.0 * ctx.rho + sigma0);
      diag[0] = ctx.rho + sigma0;
      Eigen::VectorXd off = Eigen::VectorXd::Constant(dn > 1 ? dn - 1 : 0, -ctx.rho);
      Eigen::VectorXd t1 = linalg::tridiagonal_solve(diag, off, rhs);
      if (f.kind() == LossTerm::Kind::LeastSquaresRow && f.weight() > 0.0) {
        const Eigen::VectorXd& a = f.row();
        const double two_w = 2.0 * f.weight();
        Eigen::VectorXd t2 = linalg::tridiagonal_solve(diag, off, a);
        const double denom = 1.0 + two_w * a.dot(t2);
        const double coef = two_w * a.dot(t1) / denom;
        t1 -= coef * t2;
      }
      return t1;
    }
    case LinearMap::Kind::Dense:
      break;
  }

  // Dense fallback: assemble H_f + rho A^T A + eta I and factor.
  Eigen::VectorXd x;
  if (cache != nullptr && cache->valid && cache->rho == ctx.rho &&
      cache->eta == ctx.eta) {
    x = cache->ldlt.solve(rhs);
  } else {
    Eigen::MatrixXd m = loss_hessian(f);
    if (ctx.rho != 0.0) m += ctx.rho * a_map.gram();
    if (ctx.eta != 0.0) m.diagonal().array() += ctx.eta;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success) {
      // Semidefinite corner: fall back to a min-norm least-squares solve.
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
      return cod.solve(rhs);
    }
    x = ldlt.solve(rhs);
    if (!x.allFinite()) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
      return cod.solve(rhs);
    }
    if (cache != nullptr) {
      cache->valid = true;
      cache->rho = ctx.rho;
      cache->eta = ctx.eta;
      cache->ldlt = std::move(ldlt);
    }
  }
  return x;
}

Eigen::VectorXd solve_z_update(const Regularizer& g, const ConstraintSpec& cons,
                               const Eigen::VectorXd& ax, const Eigen::VectorXd& y,
                               double rho, ZUpdateCache* cache) {
  const LinearMap& b_map = cons.b();
  const Eigen::Index n2 = cons.n2();
  if (b_map.is_negated_identity()) {
    // g(z) - <y, z> + (rho/2) ||z - (Ax - c)||^2
    if (rho > 0.0) {
      Eigen::VectorXd v = ax - cons.c() + y / rho;
      return g.prox(v, rho);
    }
    if (y.lpNorm<Eigen::Infinity>() == 0.0) return g.minimizer(n2);
    if (g.kind() == Regularizer::Kind::L1 && g.strong_convexity() > 0.0) {
      Eigen::VectorXd z = linalg::shrink(y, g.lambda());
      z /= g.strong_convexity();
      return z;
    }
    throw CapabilityError("z-update: rho = 0 with nonzero dual and no curvature");
  }

  // Dense B: closed form only when g is quadratic.
  const bool quadratic_g =
      g.kind() == Regularizer::Kind::Zero ||
      (g.kind() == Regularizer::Kind::L1 && g.lambda() == 0.0);
  if (!quadratic_g) {
    throw CapabilityError("z-update: no closed form for this regularizer with a dense B");
  }
  Eigen::VectorXd rhs = -b_map.apply_transpose(y + rho * (ax - cons.c()));
  if (cache != nullptr && cache->valid && cache->rho == rho) {
    return cache->ldlt.solve(rhs);
  }
  Eigen::MatrixXd m = rho * b_map.gram();
  m.diagonal().array() += g.strong_convexity();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) {
    throw CapabilityError("z-update: singular quadratic subproblem");
  }
  Eigen::VectorXd z = ldlt.solve(rhs);
  if (cache != nullptr) {
    cache->valid = true;
    cache->rho = rho;
    cache->ldlt = std::move(ldlt);
  }
  return z;
}

namespace {

// Fused one-pass update for the plain splitting constraint (A = I, B = -I,
// c = 0) with a rank-one least-squares term and an l1 regularizer: the case
// the structured O(n) claim is about. Equivalent to the generic route below,
// with the per-round vector traffic cut to a handful of passes.
bool splitting_lasso_fast_path(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                               const Eigen::VectorXd& y, const LossTerm& f,
                               const Regularizer& g, const ConstraintSpec& cons,
                               double eta, double rho, SinglePassResult& out) {
  if (!cons.a().is_identity() || !cons.b().is_negated_identity() ||
      !cons.c_is_zero() || f.kind() != LossTerm::Kind::LeastSquaresRow ||
      g.kind() != Regularizer::Kind::L1 || !(rho > 0.0) || f.weight() <= 0.0) {
    return false;
  }
  const double sigma = f.tikhonov() + eta + rho;
  if (!(sigma > 0.0)) return false;
  const Eigen::VectorXd& a = f.row();
  const double two_w = 2.0 * f.weight();

  // x-update: (sigma I + 2w a a^T) x = 2wb a + rho z - y + eta x_t
  Eigen::VectorXd rhs = (two_w * f.target()) * a + rho * z - y;
  if (eta != 0.0) rhs += eta * x;
  const double denom = sigma + two_w * a.squaredNorm();
  const double coef = two_w * a.dot(rhs) / denom;
  out.x = (rhs - coef * a) / sigma;

  // z-update: shrink(rho x + y, lambda) / (rho + beta2)
  rhs = rho * out.x + y;  // reuse the buffer as the scaled prox center
  linalg::shrink_into(rhs, g.lambda(), out.z);
  if (g.strong_convexity() != 0.0 || rho != 1.0) {
    out.z /= (rho + g.strong_convexity());
  }

  // dual ascent on the residual x - z
  Eigen::VectorXd r = out.x - out.z;
  out.primal_norm = r.norm();
  out.y = y + rho * r;
  out.b_z = -out.z;
  out.dual_surrogate_norm = (out.z - z).norm();
  const double res = a.dot(out.x) - f.target();
  out.objective = f.weight() * res * res + g.lambda() * out.z.lpNorm<1>();
  if (f.tikhonov() > 0.0) out.objective += 0.5 * f.tikhonov() * out.x.squaredNorm();
  if (g.strong_convexity() > 0.0) {
    out.objective += 0.5 * g.strong_convexity() * out.z.squaredNorm();
  }
  return true;
}

}  // namespace

SinglePassResult single_pass_update(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& y, const LossTerm& f,
                                    const Regularizer& g, const ConstraintSpec& cons,
                                    double eta, double rho, bool exact_x,
                                    const Eigen::VectorXd* b_z_prev,
                                    XUpdateCache* x_cache, ZUpdateCache* z_cache) {
  SinglePassResult out;
  if (exact_x && splitting_lasso_fast_path(x, z, y, f, g, cons, eta, rho, out)) {
    return out;
  }
  if (exact_x) {
    XUpdateContext ctx{cons, z, y, rho, eta, x};
    out.x = solve_x_update(f, ctx, x_cache);
  } else {
    if (!(eta > 0.0)) {
      throw ParameterError("linearized x-update: eta must be > 0");
    }
    Eigen::VectorXd grad = f.subgradient(x);
    grad += cons.a().apply_transpose(y + rho * cons.residual(x, z));
    out.x = x - grad / eta;
  }
  const Eigen::VectorXd ax = cons.a().apply(out.x);
  out.z = solve_z_update(g, cons, ax, y, rho, z_cache);
  out.b_z = cons.b().apply(out.z);
  const Eigen::VectorXd r = ax + out.b_z - cons.c();
  out.y = y + rho * r;
  out.primal_norm = r.norm();
  out.dual_surrogate_norm =
      b_z_prev != nullptr ? (out.b_z - *b_z_prev).norm()
                          : (out.b_z - cons.b().apply(z)).norm();
  out.objective = f.value(out.x) + g.value(out.z);
  return out;
}

}  // namespace oadm
