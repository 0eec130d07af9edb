#include "birkhoff/symmetric.hpp"

#include "detail.hpp"

namespace birkhoff {

namespace {

void require_symmetric(const Matrix& Z, const char* who) {
  const double scale = std::max(1.0, Z.cwiseAbs().maxCoeff());
  if (asymmetry(Z) > kSymmetryInputTol * scale) {
    throw DomainError(std::string(who) + ": input is not symmetric");
  }
}

Matrix sym_scaled_sum(const Vector& a, const Matrix& X) {
  // (a 1^T + 1 a^T) .* X
  return (a.replicate(1, X.cols()) + a.transpose().replicate(X.rows(), 1)).cwiseProduct(X);
}

}  // namespace

SymShiftSolver::SymShiftSolver(const Matrix& X) : X_(X) {
  require_square(X, "SymShiftSolver");
  require_finite(X, "SymShiftSolver");
  require_symmetric(X, "SymShiftSolver");
  // diag(X 1) in place of I, as in the doubly stochastic saddle system.
  Matrix A = symmetric_part(X);
  A.diagonal() += A.rowwise().sum();
  llt_.compute(A);
  if (llt_.info() != Eigen::Success) {
    use_llt_ = false;
    lu_.compute(A);
  }
}

Vector SymShiftSolver::solve(const Vector& v) const {
  return use_llt_ ? Vector(llt_.solve(v)) : Vector(lu_.solve(v));
}

Matrix SymShiftSolver::solve(const Matrix& B) const {
  return use_llt_ ? Matrix(llt_.solve(B)) : Matrix(lu_.solve(B));
}

Matrix SymShiftSolver::project(const Matrix& Z) const {
  require_same_shape(X_, Z, "sym_project_tangent");
  const Vector a = alpha(Z);
  return symmetric_part(Z - sym_scaled_sum(a, X_));
}

Vector sym_solve_alpha(const Matrix& X, const Matrix& Z) {
  require_same_shape(X, Z, "sym_solve_alpha");
  return SymShiftSolver(X).alpha(Z);
}

Matrix sym_project_tangent(const Matrix& X, const Matrix& Z) {
  require_same_shape(X, Z, "sym_project_tangent");
  require_symmetric(Z, "sym_project_tangent");
  return SymShiftSolver(X).project(symmetric_part(Z));
}

Matrix sym_riemannian_gradient(const Matrix& X, const Matrix& egrad) {
  require_same_shape(X, egrad, "sym_riemannian_gradient");
  require_symmetric(egrad, "sym_riemannian_gradient");
  return SymShiftSolver(X).project(symmetric_part(egrad).cwiseProduct(X));
}

Matrix sym_retract_canonical(const Matrix& X, const Matrix& xi, double floor) {
  require_same_shape(X, xi, "sym_retract_canonical");
  Matrix Y = symmetric_part(X + xi);
  const double m = Y.minCoeff();
  if (!(m >= floor)) {
    throw StepTooLargeError("canonical retraction left the positive orthant", m);
  }
  return Y;
}

BalancedRetraction sym_retract_dad_detailed(const Matrix& X, const Matrix& xi,
                                            const BalancedRetractionOptions& opts) {
  require_symmetric(X, "sym_retract_dad");
  require_symmetric(xi, "sym_retract_dad");
  const BalancedRetractionOptions o = detail::resolved(opts, X.rows());
  BalancedRetraction out;
  const Matrix B = symmetric_part(
      detail::exp_scaled_step(symmetric_part(X), symmetric_part(xi), o.exp_clamp, out.clamped));
  out.balance = dad_balance(B, o.tol, o.max_iter);
  out.point = out.balance.balanced;
  return out;
}

Matrix sym_retract_dad(const Matrix& X, const Matrix& xi, const BalancedRetractionOptions& opts) {
  return sym_retract_dad_detailed(X, xi, opts).point;
}

SymHessian::SymHessian(const Matrix& X, const Matrix& egrad)
    : X_(X), egrad_(egrad), solver_(X) {
  require_same_shape(X, egrad, "sym_riemannian_hessian");
  require_symmetric(egrad, "sym_riemannian_hessian");
  require_positive(X, "sym_riemannian_hessian");
  gamma_ = egrad.cwiseProduct(X);
  alpha_ = solver_.alpha(gamma_);
  delta_ = symmetric_part(gamma_ - sym_scaled_sum(alpha_, X));
}

Matrix SymHessian::apply(const Matrix& xi, const Matrix& ehess_xi) const {
  require_same_shape(X_, xi, "sym_riemannian_hessian");
  require_same_shape(X_, ehess_xi, "sym_riemannian_hessian");
  const Matrix gamma_dot = ehess_xi.cwiseProduct(X_) + egrad_.cwiseProduct(xi);
  // d/dt (I + X)^{-1} = -(I + X)^{-1} xi (I + X)^{-1}
  const Vector alpha_dot = solver_.solve(Vector(gamma_dot.rowwise().sum() - xi * alpha_));
  const Matrix delta_dot =
      gamma_dot - sym_scaled_sum(alpha_dot, X_) - sym_scaled_sum(alpha_, xi);
  return solver_.project(
      symmetric_part(delta_dot - 0.5 * delta_.cwiseProduct(xi).cwiseQuotient(X_)));
}

Matrix sym_riemannian_hessian(const Matrix& X, const Matrix& egrad, const Matrix& ehess_xi,
                              const Matrix& xi) {
  require_symmetric(ehess_xi, "sym_riemannian_hessian");
  require_symmetric(xi, "sym_riemannian_hessian");
  return SymHessian(X, egrad).apply(xi, ehess_xi);
}

// ---------------------------------------------------------------------------

Matrix SymmetricStochasticManifold::project_tangent(const Matrix& X, const Matrix& Z) const {
  return sym_project_tangent(X, Z);
}

Matrix SymmetricStochasticManifold::riemannian_gradient(const Matrix& X,
                                                        const Matrix& egrad) const {
  // The S_n gradient of a function on R^{n x n} is the symmetric part of its
  // Euclidean gradient.
  return sym_riemannian_gradient(X, symmetric_part(egrad));
}

HessianOperator SymmetricStochasticManifold::hessian_operator(const Matrix& X,
                                                              const Matrix& egrad) const {
  auto hess = std::make_shared<const SymHessian>(X, symmetric_part(egrad));
  return [hess](const Matrix& xi, const Matrix& ehess_xi) {
    return hess->apply(symmetric_part(xi), symmetric_part(ehess_xi));
  };
}

Matrix SymmetricStochasticManifold::retract(const Matrix& X, const Matrix& xi,
                                            RetractionKind kind) const {
  switch (kind) {
    case RetractionKind::Canonical:
      return sym_retract_canonical(X, xi);
    case RetractionKind::Balanced:
      return detail::guarded_balanced([&] { return sym_retract_dad(X, xi, balance_); },
                                      "sym retraction");
    case RetractionKind::ExpmAuto:
      break;
  }
  throw DomainError("sym: the matrix-exponential retraction is defined on the definite manifold");
}

Matrix SymmetricStochasticManifold::random_point(Rng& rng, Index n) const {
  if (n <= 0) throw DomainError("random_point: n must be positive");
  const int budget = detail::resolved({}, n).max_iter;
  const Matrix U = symmetric_part(uniform_matrix(rng, n, n));
  return dad_balance(U, detail::point_balance_tol(n), budget).balanced;
}

CheckResult SymmetricStochasticManifold::check_point(const Matrix& X,
                                                     const Tolerances& tol) const {
  CheckResult r;
  if (X.rows() != X.cols() || X.rows() == 0 || !X.allFinite()) {
    r.ok = false;
    r.reason = "not a finite nonempty square matrix";
    return r;
  }
  r.min_entry = X.minCoeff();
  r.row_residual = row_sum_residual(X);
  r.col_residual = col_sum_residual(X);
  r.asymmetry = asymmetry(X);
  if (!(r.min_entry > tol.positivity_floor)) {
    r.ok = false;
    r.reason = "entry below positivity floor";
  } else if (r.asymmetry > tol.symmetry_tol) {
    r.ok = false;
    r.reason = "not symmetric";
  } else if (r.row_residual > tol.sum_tol) {
    r.ok = false;
    r.reason = "row sums differ from 1";
  }
  return r;
}

CheckResult SymmetricStochasticManifold::check_tangent(const Matrix& X, const Matrix& xi,
                                                       const Tolerances& tol) const {
  CheckResult r;
  if (X.rows() != xi.rows() || X.cols() != xi.cols() || !xi.allFinite()) {
    r.ok = false;
    r.reason = "shape mismatch or non-finite entry";
    return r;
  }
  const double scale = std::max(1.0, xi.cwiseAbs().maxCoeff());
  r.row_residual = xi.rowwise().sum().cwiseAbs().maxCoeff();
  r.col_residual = xi.colwise().sum().cwiseAbs().maxCoeff();
  r.asymmetry = asymmetry(xi);
  if (r.asymmetry > tol.symmetry_tol * scale) {
    r.ok = false;
    r.reason = "tangent vector is not symmetric";
  } else if (r.row_residual > tol.tangent_tol * scale) {
    r.ok = false;
    r.reason = "Z 1 is not zero";
  }
  return r;
}

}  // namespace birkhoff
