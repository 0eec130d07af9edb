#pragma once

// Generators and independent oracles shared by the unit tests.

#include "birkhoff/doubly_stochastic.hpp"
#include "birkhoff/manifold.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

namespace birkhoff::test {

inline const std::vector<ManifoldKind>& all_kinds() {
  static const std::vector<ManifoldKind> k = {ManifoldKind::DoublyStochastic,
                                              ManifoldKind::SymmetricStochastic,
                                              ManifoldKind::DefiniteSymmetricStochastic};
  return k;
}

inline bool is_symmetric_kind(ManifoldKind k) { return k != ManifoldKind::DoublyStochastic; }

inline double max_abs(const Matrix& A) { return A.cwiseAbs().maxCoeff(); }

/// Random direction in the embedding space of the manifold.
inline Matrix random_ambient(const Manifold& M, Rng& rng, Index n) {
  return M.to_embedding(gaussian_matrix(rng, n, n));
}

/// Scales xi so that X +- t xi stays above X / 2 for |t| <= t_max.
inline Matrix safe_direction(const Matrix& X, const Matrix& xi, double t_max) {
  const double r = xi.cwiseQuotient(X).cwiseAbs().maxCoeff();
  return r > 0.0 ? Matrix(xi * (0.5 / (r * t_max))) : xi;
}

/// Basis of the tangent space built without the projection under test:
/// E_ij - E_in - E_nj + E_nn for the doubly stochastic case and its symmetric
/// counterparts, orthonormalized in the Fisher metric at X.
inline std::vector<Matrix> fisher_orthonormal_tangent_basis(const Matrix& X, bool symmetric) {
  const Index n = X.rows();
  std::vector<Matrix> raw;
  if (!symmetric) {
    for (Index i = 0; i + 1 < n; ++i)
      for (Index j = 0; j + 1 < n; ++j) {
        Matrix B = Matrix::Zero(n, n);
        B(i, j) += 1;
        B(i, n - 1) -= 1;
        B(n - 1, j) -= 1;
        B(n - 1, n - 1) += 1;
        raw.push_back(B);
      }
  } else {
    // Edge Laplacians (e_i - e_j)(e_i - e_j)^T: one per off-diagonal pair,
    // which determines a symmetric zero-row-sum matrix.
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        Matrix B = Matrix::Zero(n, n);
        B(i, i) = B(j, j) = 1;
        B(i, j) = B(j, i) = -1;
        raw.push_back(B);
      }
  }
  std::vector<Matrix> basis;
  for (Matrix B : raw) {
    for (const Matrix& Q : basis) B -= fisher_inner(X, Q, B) * Q;
    const double nb = fisher_norm(X, B);
    if (nb > 1e-10) basis.push_back(B / nb);
  }
  return basis;
}

/// Hessian oracle from a central difference of the Riemannian gradient along
/// the affine line, plus the metric correction of the Fisher connection.
template <class GradFn>
Matrix hessian_fd_oracle(const Manifold& M, const Matrix& X, const Matrix& xi, GradFn rgrad,
                         double h = 1e-5) {
  const Matrix dg = (rgrad(Matrix(X + h * xi)) - rgrad(Matrix(X - h * xi))) / (2.0 * h);
  const Matrix g = rgrad(X);
  return M.project_tangent(X, M.to_embedding(dg - 0.5 * xi.cwiseProduct(g).cwiseQuotient(X)));
}

/// Least-squares slope of log e against log t.
inline double loglog_slope(const std::vector<double>& t, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = std::log(t[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace birkhoff::test
