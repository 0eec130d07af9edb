#pragma once

// Geometry of the doubly stochastic multinomial manifold
//   DP_n = { X in R^{n x n} : X_ij > 0, X 1 = 1, X^T 1 = 1 }
// with tangent space { Z : Z 1 = 0, Z^T 1 = 0 } and the Fisher metric.

#include "birkhoff/balancing.hpp"
#include "birkhoff/manifold.hpp"

namespace birkhoff {

struct AlphaBeta {
  Vector alpha;
  Vector beta;
};

/// Factorization of the saddle system [[I, X], [X^T, I]] at a fixed X, with
/// the identity blocks taken as diag(X 1) and diag(X^T 1) (equal to I on the
/// manifold).
///
/// The system is singular along (1; -1). Adding the normalized rank-one term
/// v v^T for that direction gives an SPD matrix whose solution, for a
/// consistent right-hand side, is the minimum-norm solution of the original
/// system.
class DsSaddleSolver {
 public:
  explicit DsSaddleSolver(const Matrix& X);

  /// Minimum-norm (alpha, beta) with alpha + X beta = Z 1 and
  /// X^T alpha + beta = Z^T 1. Throws NumericalError if the residual exceeds
  /// 1e-8 * (norm of the right-hand side + norm of the solution).
  AlphaBeta solve(const Matrix& Z) const;
  AlphaBeta solve_rhs(const Vector& row_sums, const Vector& col_sums) const;

  /// Z - (alpha 1^T + 1 beta^T) .* X
  Matrix project(const Matrix& Z) const;

  const Matrix& point() const { return X_; }

 private:
  Matrix X_;
  Eigen::LLT<Matrix> llt_;
  bool use_llt_ = true;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod_;
};

AlphaBeta ds_solve_alpha_beta(const Matrix& X, const Matrix& Z);
Matrix ds_project_tangent(const Matrix& X, const Matrix& Z);
Matrix ds_riemannian_gradient(const Matrix& X, const Matrix& egrad);

/// X + xi; throws StepTooLargeError when an entry drops below `floor`.
Matrix ds_retract_canonical(const Matrix& X, const Matrix& xi, double floor = 1e-14);

struct BalancedRetractionOptions {
  /// Tighter than kDefaultBalanceTol so retracted iterates sit well inside
  /// the 1e-10 point-check tolerance.
  double tol = 1e-12;
  /// <= 0 selects max(default_balance_iterations(n), 20000); retraction
  /// inputs can be far less well balanced than generic positive matrices.
  int max_iter = 0;
  /// The exponent xi ./ X is clamped to [-exp_clamp, exp_clamp].
  double exp_clamp = 50.0;
};

struct BalancedRetraction {
  Matrix point;
  bool clamped = false;
  BalanceResult balance;
};

BalancedRetraction ds_retract_sinkhorn_detailed(const Matrix& X, const Matrix& xi,
                                                const BalancedRetractionOptions& opts = {});
/// Sinkhorn(X .* exp(xi ./ X)).
Matrix ds_retract_sinkhorn(const Matrix& X, const Matrix& xi,
                           const BalancedRetractionOptions& opts = {});

/// Moore-Penrose pseudo-inverse of I - X X^T through a symmetric
/// eigendecomposition; eigenvalues <= n * eps * max|lambda| count as zero.
struct PseudoInverse {
  Matrix value;
  Index rank = 0;
  double cutoff = 0.0;
};
PseudoInverse ds_pinv_i_minus_xxt(const Matrix& X);

/// epsilon (X xi^T + xi X^T) epsilon: the directional derivative of
/// (I - X X^T)^+ along a tangent vector xi.
Matrix ds_epsilon_dot(const Matrix& epsilon, const Matrix& X, const Matrix& xi);

/// Every intermediate symbol of the Hessian chain for one (X, xi).
struct HessianWorkspace {
  Matrix gamma, delta, gamma_dot, delta_dot;
  Vector alpha, beta, alpha_dot, beta_dot;
  Matrix epsilon;
  Matrix epsilon_dot;
  Matrix hessian;
};

/// Riemannian Hessian on DP_n at a fixed (X, Grad f(X)).
///
/// Construction computes gamma, epsilon, alpha, beta and delta (= grad f);
/// each apply() is O(n^2) apart from the final tangent projection, which
/// reuses the cached saddle factorization.
class DsHessian {
 public:
  DsHessian(const Matrix& X, const Matrix& egrad);

  Matrix apply(const Matrix& xi, const Matrix& ehess_xi) const;

  /// Same result as apply(), but materializes every symbol including the
  /// n x n epsilon_dot matrix.
  HessianWorkspace workspace(const Matrix& xi, const Matrix& ehess_xi) const;

  const Matrix& gradient() const { return delta_; }

 private:
  Matrix X_, egrad_, gamma_, delta_, epsilon_;
  Vector alpha_, beta_, v_;  // v = (gamma - X gamma^T) 1
  DsSaddleSolver projector_;
};

Matrix ds_riemannian_hessian(const Matrix& X, const Matrix& egrad, const Matrix& ehess_xi,
                             const Matrix& xi);

class DoublyStochasticManifold final : public Manifold {
 public:
  explicit DoublyStochasticManifold(BalancedRetractionOptions balance = {})
      : balance_(balance) {}

  ManifoldKind kind() const override { return ManifoldKind::DoublyStochastic; }
  Index dimension(Index n) const override { return (n - 1) * (n - 1); }
  Matrix to_embedding(const Matrix& Z) const override { return Z; }
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

 private:
  BalancedRetractionOptions balance_;
};

}  // namespace birkhoff
