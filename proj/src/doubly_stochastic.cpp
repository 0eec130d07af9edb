#include "birkhoff/doubly_stochastic.hpp"

#include "detail.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace birkhoff {

namespace {

// The identity blocks of the textbook system are the row and column sums of
// X; using the actual sums keeps projections tangent to rounding level when X
// is only balanced to a tolerance, where alpha and beta can be large.
Matrix saddle_matrix(const Matrix& X) {
  const Index n = X.rows();
  Matrix M = Matrix::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n).diagonal() = X.rowwise().sum();
  M.bottomRightCorner(n, n).diagonal() = X.colwise().sum().transpose();
  M.topRightCorner(n, n) = X;
  M.bottomLeftCorner(n, n) = X.transpose();
  return M;
}

Vector null_direction(Index n) {
  Vector v(2 * n);
  v.head(n).setOnes();
  v.tail(n).setConstant(-1.0);
  return v / std::sqrt(2.0 * static_cast<double>(n));
}

Matrix scaled_sum(const Vector& a, const Vector& b, const Matrix& X) {
  // (a 1^T + 1 b^T) .* X
  return (a.replicate(1, X.cols()) + b.transpose().replicate(X.rows(), 1)).cwiseProduct(X);
}

}  // namespace

DsSaddleSolver::DsSaddleSolver(const Matrix& X) : X_(X) {
  require_square(X, "DsSaddleSolver");
  require_finite(X, "DsSaddleSolver");
  const Index n = X.rows();
  const Vector v = null_direction(n);
  Matrix M = saddle_matrix(X);
  llt_.compute(M + v * v.transpose());
  if (llt_.info() != Eigen::Success) {
    use_llt_ = false;
    cod_.compute(M);
  }
}

AlphaBeta DsSaddleSolver::solve_rhs(const Vector& row_sums, const Vector& col_sums) const {
  const Index n = X_.rows();
  if (row_sums.size() != n || col_sums.size() != n) {
    throw ShapeError("DsSaddleSolver: right-hand side has the wrong length");
  }
  Vector b(2 * n);
  b.head(n) = row_sums;
  b.tail(n) = col_sums;
  // The system is consistent only when sum(row_sums) == sum(col_sums); drop
  // the rounding-level component along the null direction so the augmented
  // solve returns the minimum-norm solution, and measure the residual against
  // the consistent part.
  const Vector v = null_direction(n);
  b -= v * v.dot(b);
  const Vector y = use_llt_ ? Vector(llt_.solve(b)) : Vector(cod_.solve(b));
  AlphaBeta ab{y.head(n), y.tail(n)};

  const Vector r = X_.rowwise().sum(), c = X_.colwise().sum().transpose();
  const double res_rows =
      (r.cwiseProduct(ab.alpha) + X_ * ab.beta - b.head(n)).cwiseAbs().maxCoeff();
  const double res_cols =
      (X_.transpose() * ab.alpha + c.cwiseProduct(ab.beta) - b.tail(n)).cwiseAbs().maxCoeff();
  const double residual = std::max(res_rows, res_cols);
  const double scale =
      std::max(b.norm() + y.norm(), std::numeric_limits<double>::min());
  if (!std::isfinite(residual) || residual > 1e-8 * scale) {
    std::ostringstream os;
    os << "ds_solve_alpha_beta: saddle-system residual " << residual << " exceeds tolerance";
    throw NumericalError(os.str(), residual);
  }
  return ab;
}

AlphaBeta DsSaddleSolver::solve(const Matrix& Z) const {
  require_same_shape(X_, Z, "ds_solve_alpha_beta");
  return solve_rhs(Z.rowwise().sum(), Z.colwise().sum().transpose());
}

Matrix DsSaddleSolver::project(const Matrix& Z) const {
  const AlphaBeta ab = solve(Z);
  return Z - scaled_sum(ab.alpha, ab.beta, X_);
}

AlphaBeta ds_solve_alpha_beta(const Matrix& X, const Matrix& Z) {
  return DsSaddleSolver(X).solve(Z);
}

Matrix ds_project_tangent(const Matrix& X, const Matrix& Z) {
  return DsSaddleSolver(X).project(Z);
}

Matrix ds_riemannian_gradient(const Matrix& X, const Matrix& egrad) {
  require_same_shape(X, egrad, "ds_riemannian_gradient");
  return ds_project_tangent(X, egrad.cwiseProduct(X));
}

Matrix ds_retract_canonical(const Matrix& X, const Matrix& xi, double floor) {
  require_same_shape(X, xi, "ds_retract_canonical");
  Matrix Y = X + xi;
  const double m = Y.minCoeff();
  if (!(m >= floor)) {
    throw StepTooLargeError("canonical retraction left the positive orthant", m);
  }
  return Y;
}

namespace detail {

double point_balance_tol(Index n) {
  return std::max(1e-14, 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon());
}

BalancedRetractionOptions resolved(const BalancedRetractionOptions& opts, Index n) {
  BalancedRetractionOptions out = opts;
  if (out.max_iter <= 0) out.max_iter = std::max(default_balance_iterations(n), 20000);
  return out;
}

Matrix exp_scaled_step(const Matrix& X, const Matrix& xi, double clamp, bool& clamped) {
  require_same_shape(X, xi, "balanced retraction");
  require_positive(X, "balanced retraction");
  Matrix arg = xi.cwiseQuotient(X);
  clamped = arg.cwiseAbs().maxCoeff() > clamp;
  if (clamped) arg = arg.cwiseMax(-clamp).cwiseMin(clamp);
  return X.cwiseProduct(arg.array().exp().matrix());
}

}  // namespace detail

BalancedRetraction ds_retract_sinkhorn_detailed(const Matrix& X, const Matrix& xi,
                                                const BalancedRetractionOptions& opts) {
  const BalancedRetractionOptions o = detail::resolved(opts, X.rows());
  BalancedRetraction out;
  const Matrix B = detail::exp_scaled_step(X, xi, o.exp_clamp, out.clamped);
  out.balance = sinkhorn_knopp(B, o.tol, o.max_iter);
  out.point = out.balance.balanced;
  return out;
}

Matrix ds_retract_sinkhorn(const Matrix& X, const Matrix& xi,
                           const BalancedRetractionOptions& opts) {
  return ds_retract_sinkhorn_detailed(X, xi, opts).point;
}

PseudoInverse ds_pinv_i_minus_xxt(const Matrix& X) {
  require_square(X, "ds_pinv_i_minus_xxt");
  const Index n = X.rows();
  // Sandwiching by the projector onto 1^perp pins the known null direction
  // exactly even when X is doubly stochastic only to balancing accuracy.
  const Matrix P = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  Matrix A = Matrix::Identity(n, n) - X * X.transpose();
  A = P * A * P;
  A = symmetric_part(A);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success) {
    throw NumericalError("ds_pinv_i_minus_xxt: eigendecomposition failed", 0.0);
  }
  const Vector& lam = es.eigenvalues();
  PseudoInverse out;
  out.cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
               lam.cwiseAbs().maxCoeff();
  Vector inv(n);
  for (Index i = 0; i < n; ++i) {
    if (std::abs(lam(i)) > out.cutoff) {
      inv(i) = 1.0 / lam(i);
      ++out.rank;
    } else {
      inv(i) = 0.0;
    }
  }
  const Matrix& U = es.eigenvectors();
  out.value = symmetric_part(U * inv.asDiagonal() * U.transpose());
  return out;
}

Matrix ds_epsilon_dot(const Matrix& epsilon, const Matrix& X, const Matrix& xi) {
  return epsilon * (X * xi.transpose() + xi * X.transpose()) * epsilon;
}

DsHessian::DsHessian(const Matrix& X, const Matrix& egrad)
    : X_(X), egrad_(egrad), projector_(X) {
  require_same_shape(X, egrad, "ds_riemannian_hessian");
  require_positive(X, "ds_riemannian_hessian");
  const Vector ones = Vector::Ones(X.rows());
  gamma_ = egrad.cwiseProduct(X);
  epsilon_ = ds_pinv_i_minus_xxt(X).value;
  v_ = gamma_ * ones - X * (gamma_.transpose() * ones);
  alpha_ = epsilon_ * v_;
  beta_ = gamma_.transpose() * ones - X.transpose() * alpha_;
  delta_ = gamma_ - scaled_sum(alpha_, beta_, X);
}

HessianWorkspace DsHessian::workspace(const Matrix& xi, const Matrix& ehess_xi) const {
  require_same_shape(X_, xi, "ds_riemannian_hessian");
  require_same_shape(X_, ehess_xi, "ds_riemannian_hessian");
  const Vector ones = Vector::Ones(X_.rows());
  HessianWorkspace ws;
  ws.gamma = gamma_;
  ws.alpha = alpha_;
  ws.beta = beta_;
  ws.delta = delta_;
  ws.epsilon = epsilon_;
  ws.gamma_dot = ehess_xi.cwiseProduct(X_) + egrad_.cwiseProduct(xi);
  ws.epsilon_dot = ds_epsilon_dot(epsilon_, X_, xi);
  // d/dt of (gamma - X gamma^T) 1 along xi is (gamma_dot - xi gamma^T - X gamma_dot^T) 1.
  const Vector u = ws.gamma_dot * ones - xi * (gamma_.transpose() * ones) -
                   X_ * (ws.gamma_dot.transpose() * ones);
  ws.alpha_dot = ws.epsilon_dot * v_ + epsilon_ * u;
  ws.beta_dot = ws.gamma_dot.transpose() * ones - xi.transpose() * alpha_ -
                X_.transpose() * ws.alpha_dot;
  ws.delta_dot = ws.gamma_dot - scaled_sum(ws.alpha_dot, ws.beta_dot, X_) -
                 scaled_sum(alpha_, beta_, xi);
  ws.hessian =
      projector_.project(ws.delta_dot - 0.5 * delta_.cwiseProduct(xi).cwiseQuotient(X_));
  return ws;
}

Matrix DsHessian::apply(const Matrix& xi, const Matrix& ehess_xi) const {
  require_same_shape(X_, xi, "ds_riemannian_hessian");
  require_same_shape(X_, ehess_xi, "ds_riemannian_hessian");
  const Vector ones = Vector::Ones(X_.rows());
  const Matrix gamma_dot = ehess_xi.cwiseProduct(X_) + egrad_.cwiseProduct(xi);
  // epsilon_dot v = epsilon (X xi^T + xi X^T) epsilon v, with epsilon v = alpha.
  const Vector eps_dot_v =
      epsilon_ * (X_ * (xi.transpose() * alpha_) + xi * (X_.transpose() * alpha_));
  const Vector u = gamma_dot * ones - xi * (gamma_.transpose() * ones) -
                   X_ * (gamma_dot.transpose() * ones);
  const Vector alpha_dot = eps_dot_v + epsilon_ * u;
  const Vector beta_dot =
      gamma_dot.transpose() * ones - xi.transpose() * alpha_ - X_.transpose() * alpha_dot;
  const Matrix delta_dot =
      gamma_dot - scaled_sum(alpha_dot, beta_dot, X_) - scaled_sum(alpha_, beta_, xi);
  return projector_.project(delta_dot - 0.5 * delta_.cwiseProduct(xi).cwiseQuotient(X_));
}

Matrix ds_riemannian_hessian(const Matrix& X, const Matrix& egrad, const Matrix& ehess_xi,
                             const Matrix& xi) {
  return DsHessian(X, egrad).apply(xi, ehess_xi);
}

// ---------------------------------------------------------------------------

Matrix DoublyStochasticManifold::project_tangent(const Matrix& X, const Matrix& Z) const {
  return ds_project_tangent(X, Z);
}

Matrix DoublyStochasticManifold::riemannian_gradient(const Matrix& X,
                                                     const Matrix& egrad) const {
  return ds_riemannian_gradient(X, egrad);
}

HessianOperator DoublyStochasticManifold::hessian_operator(const Matrix& X,
                                                           const Matrix& egrad) const {
  auto hess = std::make_shared<const DsHessian>(X, egrad);
  return [hess](const Matrix& xi, const Matrix& ehess_xi) { return hess->apply(xi, ehess_xi); };
}

Matrix DoublyStochasticManifold::retract(const Matrix& X, const Matrix& xi,
                                         RetractionKind kind) const {
  switch (kind) {
    case RetractionKind::Canonical:
      return ds_retract_canonical(X, xi);
    case RetractionKind::Balanced:
      return detail::guarded_balanced([&] { return ds_retract_sinkhorn(X, xi, balance_); },
                                      "ds retraction");
    case RetractionKind::ExpmAuto:
      break;
  }
  throw DomainError("ds: the matrix-exponential retraction requires symmetric tangent vectors");
}

Matrix DoublyStochasticManifold::random_point(Rng& rng, Index n) const {
  if (n <= 0) throw DomainError("random_point: n must be positive");
  const int budget = detail::resolved({}, n).max_iter;
  return sinkhorn_knopp(uniform_matrix(rng, n, n), detail::point_balance_tol(n), budget).balanced;
}

CheckResult DoublyStochasticManifold::check_point(const Matrix& X, const Tolerances& tol) const {
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
  } else if (r.row_residual > tol.sum_tol || r.col_residual > tol.sum_tol) {
    r.ok = false;
    r.reason = "row/column sums differ from 1";
  }
  return r;
}

CheckResult DoublyStochasticManifold::check_tangent(const Matrix& X, const Matrix& xi,
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
  if (r.row_residual > tol.tangent_tol * scale || r.col_residual > tol.tangent_tol * scale) {
    r.ok = false;
    r.reason = "Z 1 or Z^T 1 is not zero";
  }
  return r;
}

}  // namespace birkhoff
