#pragma once

// Restarted Lanczos for the largest eigenpair of a Hermitian operator given
// only through its action on vectors.

#include <Eigen/Dense>

#include <cmath>

#include "freecp/matrixkit.hpp"

namespace freecp {

struct LanczosOptions {
  int krylov_dim = 30;
  int max_restarts = 40;
  double tolerance = 1e-10;  ///< on ||Av - theta v|| / max(1, |theta|)
};

struct TopEigenpair {
  double value = 0.0;
  CVec vector;
  double residual = 0.0;
  bool converged = false;
};

/// Largest algebraic eigenpair of the Hermitian operator `apply` (CVec -> CVec).
/// The Ritz value never falls below the Rayleigh quotient of `start`.
template <class MatVec>
TopEigenpair lanczos_top(MatVec&& apply, const CVec& start, const LanczosOptions& opt = {}) {
  const Eigen::Index n = start.size();
  if (n == 0) throw DimensionError("lanczos_top: empty start vector");
  const double start_norm = start.norm();
  if (!(start_norm > 0.0)) throw DomainError("lanczos_top: zero start vector");

  const Eigen::Index m = std::min<Eigen::Index>(std::max(opt.krylov_dim, 2), n);
  CVec v = start / start_norm;
  TopEigenpair best;
  best.vector = v;

  CMat basis(n, m);
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    RVec alpha = RVec::Zero(m);
    RVec beta = RVec::Zero(m);
    basis.col(0) = v;
    Eigen::Index used = m;
    for (Eigen::Index j = 0; j < m; ++j) {
      CVec w = apply(basis.col(j));
      alpha(j) = basis.col(j).dot(w).real();
      // two passes of classical Gram-Schmidt against the whole basis
      for (int pass = 0; pass < 2; ++pass) {
        const CVec coeff = basis.leftCols(j + 1).adjoint() * w;
        w.noalias() -= basis.leftCols(j + 1) * coeff;
      }
      if (j + 1 == m) break;
      beta(j) = w.norm();
      if (beta(j) <= 1e-14 * std::max(1.0, std::abs(alpha(j)))) {
        used = j + 1;  // invariant subspace
        break;
      }
      basis.col(j + 1) = w / beta(j);
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(used, used);
    for (Eigen::Index j = 0; j < used; ++j) {
      t(j, j) = alpha(j);
      if (j + 1 < used) t(j, j + 1) = t(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
    const Eigen::Index top = used - 1;
    const double theta = small.eigenvalues()(top);
    CVec ritz = basis.leftCols(used) * small.eigenvectors().col(top).cast<Complex>();
    ritz.normalize();

    const CVec r = apply(ritz) - theta * ritz;
    const double res = r.norm() / std::max(1.0, std::abs(theta));
    if (restart == 0 || theta >= best.value) {
      best.value = theta;
      best.vector = ritz;
      best.residual = res;
    }
    if (res <= opt.tolerance || used < m) {
      best.converged = true;
      break;
    }
    v = ritz;
  }
  return best;
}

}  // namespace freecp
