#pragma once

// Symmetric multinomial manifold SP_n = { X in S_n : X_ij > 0, X 1 = 1 },
// embedded in the space of symmetric matrices S_n.

#include "birkhoff/doubly_stochastic.hpp"

namespace birkhoff {

/// Cholesky factorization of I + X for X in SP_n (I + X is SPD because the
/// spectrum of X lies in (-1, 1]). The identity is taken as diag(X 1), which
/// equals I on the manifold and keeps projections exactly tangent when X is
/// balanced only to a tolerance.
class SymShiftSolver {
 public:
  explicit SymShiftSolver(const Matrix& X);

  /// (I + X)^{-1} v
  Vector solve(const Vector& v) const;
  Matrix solve(const Matrix& B) const;

  /// alpha = (I + X)^{-1} Z 1
  Vector alpha(const Matrix& Z) const { return solve(Vector(Z.rowwise().sum())); }

  /// Z - (alpha 1^T + 1 alpha^T) .* X, symmetrized exactly.
  Matrix project(const Matrix& Z) const;

  const Matrix& point() const { return X_; }

 private:
  Matrix X_;
  Eigen::LLT<Matrix> llt_;
  bool use_llt_ = true;
  Eigen::PartialPivLU<Matrix> lu_;
};

/// Symmetric inputs are required within this (relative) tolerance.
inline constexpr double kSymmetryInputTol = 1e-10;

Vector sym_solve_alpha(const Matrix& X, const Matrix& Z);
Matrix sym_project_tangent(const Matrix& X, const Matrix& Z);
Matrix sym_riemannian_gradient(const Matrix& X, const Matrix& egrad);
Matrix sym_retract_canonical(const Matrix& X, const Matrix& xi, double floor = 1e-14);

BalancedRetraction sym_retract_dad_detailed(const Matrix& X, const Matrix& xi,
                                            const BalancedRetractionOptions& opts = {});
/// DAD(X .* exp(xi ./ X)).
Matrix sym_retract_dad(const Matrix& X, const Matrix& xi,
                       const BalancedRetractionOptions& opts = {});

/// Riemannian Hessian on SP_n at fixed (X, Grad f(X)); egrad must be
/// symmetric.
class SymHessian {
 public:
  SymHessian(const Matrix& X, const Matrix& egrad);
  Matrix apply(const Matrix& xi, const Matrix& ehess_xi) const;
  const Matrix& gradient() const { return delta_; }

 private:
  Matrix X_, egrad_, gamma_, delta_;
  Vector alpha_;
  SymShiftSolver solver_;
};

Matrix sym_riemannian_hessian(const Matrix& X, const Matrix& egrad, const Matrix& ehess_xi,
                              const Matrix& xi);

/// Shared geometry of SP_n and SP_n^+. The definite manifold overrides the
/// retractions and point checks.
class SymmetricStochasticManifold : public Manifold {
 public:
  explicit SymmetricStochasticManifold(BalancedRetractionOptions balance = {})
      : balance_(balance) {}

  ManifoldKind kind() const override { return ManifoldKind::SymmetricStochastic; }
  Index dimension(Index n) const override { return n * (n - 1) / 2; }
  Matrix to_embedding(const Matrix& Z) const override { return symmetric_part(Z); }
  Matrix project_tangent(const Matrix& X, const Matrix& Z) const override;
  Matrix riemannian_gradient(const Matrix& X, const Matrix& egrad) const override;
  HessianOperator hessian_operator(const Matrix& X, const Matrix& egrad) const override;
  Matrix retract(const Matrix& X, const Matrix& xi, RetractionKind kind) const override;
  std::vector<RetractionKind> retractions() const override {
    return {RetractionKind::Canonical, RetractionKind::Balanced};
  }
  RetractionKind default_retraction() const override { return RetractionKind::Balanced; }
  Matrix random_point(Rng& rng, Index n) const override;
  CheckResult check_point(const Matrix& X, const Tolerances& tol = {}) const override;
  CheckResult check_tangent(const Matrix& X, const Matrix& xi,
                            const Tolerances& tol = {}) const override;

 protected:
  BalancedRetractionOptions balance_;
};

}  // namespace birkhoff
