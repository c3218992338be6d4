#pragma once

#include <optional>

#include <Eigen/Dense>

#include "oadm/constraint.hpp"
#include "oadm/loss.hpp"

namespace oadm {

// Cached dense factorization for repeated x-updates with fixed (f, cons,
// rho, eta), as in a batch run. The structured O(n) paths never need it.
struct XUpdateCache {
  bool valid = false;
  double rho = 0.0;
  double eta = 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

struct ZUpdateCache {
  bool valid = false;
  double rho = 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

// Solves the x-subproblem
//   argmin_x f(x) + <y, A x + B z - c> + (rho/2) ||A x + B z - c||^2
//             + (eta/2) ||x - anchor||^2
// in closed form for the quadratic loss kinds (Sherman-Morrison against the
// structured constraint grams, dense LDLT otherwise), or via the loss's own
// solver for Custom kinds. Throws CapabilityError when neither applies.
Eigen::VectorXd solve_x_update(const LossTerm& f, const XUpdateContext& ctx,
                               XUpdateCache* cache = nullptr);

// Solves the z-subproblem
//   argmin_z g(z) + <y, Ax + B z - c> + (rho/2) ||Ax + B z - c||^2
// via g's prox when B is a negated identity, or a linear solve when B is
// dense and g is quadratic. ax is the already-computed A x_{t+1}.
Eigen::VectorXd solve_z_update(const Regularizer& g, const ConstraintSpec& cons,
                               const Eigen::VectorXd& ax, const Eigen::VectorXd& y,
                               double rho, ZUpdateCache* cache = nullptr);

// One full pass of the three updates (x-solve or linearized x-step, z-solve,
// dual ascent). Shared by the batch iteration and the per-round online
// solver so that the two produce bitwise-identical iterates when run with
// the same inputs. b_z_prev, when given, must equal B z (it is reused to
// avoid recomputing the map); b_z on the result holds B z_next.
struct SinglePassResult {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd y;
  Eigen::VectorXd b_z;
  double primal_norm = 0.0;
  double dual_surrogate_norm = 0.0;
  double objective = 0.0;  // f(x_next) + g(z_next)
};

SinglePassResult single_pass_update(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& y, const LossTerm& f,
                                    const Regularizer& g, const ConstraintSpec& cons,
                                    double eta, double rho, bool exact_x,
                                    const Eigen::VectorXd* b_z_prev = nullptr,
                                    XUpdateCache* x_cache = nullptr,
                                    ZUpdateCache* z_cache = nullptr);

}  // namespace oadm
