#include "birkhoff/balancing.hpp"

#include <cmath>
#include <sstream>

namespace birkhoff {

int default_balance_iterations(Index n) {
  const double nn = static_cast<double>(std::max<Index>(n, 1));
  return static_cast<int>(10.0 * nn * std::ceil(std::log(nn) + 1.0));
}

namespace {

void validate_positive_square(const Matrix& A, const char* who) {
  require_square(A, who);
  require_finite(A, who);
  require_positive(A, who);
}

double balance_residual(const Matrix& B) {
  return std::max(row_sum_residual(B), col_sum_residual(B));
}

}  // namespace

BalanceResult sinkhorn_knopp(const Matrix& A, double tol, int max_iter) {
  validate_positive_square(A, "sinkhorn_knopp");
  const Index n = A.rows();
  if (max_iter <= 0) max_iter = default_balance_iterations(n);

  Vector r = Vector::Ones(n);
  Vector c = Vector::Ones(n);
  Vector Ac = A * c;
  Vector Atr = A.transpose() * r;

  // Residual of diag(r) A diag(c) from the cached products.
  auto residual = [&]() {
    const double rows = (r.array() * Ac.array() - 1.0).abs().maxCoeff();
    const double cols = (c.array() * Atr.array() - 1.0).abs().maxCoeff();
    return std::max(rows, cols);
  };

  auto finish = [&](int iterations) {
    BalanceResult out;
    const double s = r(0);
    out.left_scale = r / s;
    out.right_scale = c * s;
    out.balanced = out.left_scale.asDiagonal() * A * out.right_scale.asDiagonal();
    out.iterations = iterations;
    out.residual = balance_residual(out.balanced);
    return out;
  };

  double res = residual();
  if (res <= tol) return finish(0);

  Vector best_r = r, best_c = c;
  double best_res = res;
  int best_it = 0;
  for (int it = 1; it <= max_iter; ++it) {
    r = Ac.cwiseInverse();
    Atr.noalias() = A.transpose() * r;
    c = Atr.cwiseInverse();
    Ac.noalias() = A * c;
    res = residual();
    if (!std::isfinite(res)) break;
    if (res < best_res) {
      best_res = res;
      best_r = r;
      best_c = c;
      best_it = it;
    }
    if (res <= tol) {
      BalanceResult out = finish(it);
      if (out.residual <= tol) return out;
    }
  }
  r = best_r;
  c = best_c;
  Ac = A * c;
  Atr = A.transpose() * r;
  BalanceResult best = finish(best_it);
  std::ostringstream os;
  os << "sinkhorn_knopp: no convergence after " << max_iter << " iterations (residual "
     << best.residual << ", tol " << tol << ")";
  throw BalanceNonConvergence(os.str(), std::move(best));
}

BalanceResult dad_balance(const Matrix& A, double tol, int max_iter) {
  validate_positive_square(A, "dad_balance");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (asymmetry(A) > 1e-12 * scale) {
    throw DomainError("dad_balance: input is not symmetric");
  }
  const Index n = A.rows();
  if (max_iter <= 0) max_iter = default_balance_iterations(n);
  const Matrix S = symmetric_part(A);

  Vector d = (S.rowwise().sum()).cwiseSqrt().cwiseInverse();
  Vector Sd = S * d;
  auto residual = [&]() { return (d.array() * Sd.array() - 1.0).abs().maxCoeff(); };

  auto finish = [&](int iterations) {
    BalanceResult out;
    out.balanced.resize(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i <= j; ++i) {
        const double v = d(i) * S(i, j) * d(j);
        out.balanced(i, j) = v;
        out.balanced(j, i) = v;
      }
    out.left_scale = d;
    out.right_scale = d;
    out.iterations = iterations;
    out.residual = balance_residual(out.balanced);
    return out;
  };

  double res = residual();
  if (res <= tol) {
    BalanceResult out = finish(0);
    if (out.residual <= tol) return out;
  }
  Vector best_d = d;
  double best_res = res;
  int best_it = 0;
  // u <- 1 / (S u) is Sinkhorn on a symmetric matrix; consecutive half-steps
  // converge to t v and v / t for the DAD scaling v, so their geometric mean
  // converges to v at the Sinkhorn rate.
  Vector u = d, Su = Sd;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector u_next = Su.cwiseInverse();
    d = (u.array() * u_next.array()).sqrt();
    Sd.noalias() = S * d;
    u = u_next;
    Su.noalias() = S * u;
    res = residual();
    if (!std::isfinite(res)) break;
    if (res < best_res) {
      best_res = res;
      best_d = d;
      best_it = it;
    }
    if (res <= tol) {
      BalanceResult out = finish(it);
      if (out.residual <= tol) return out;
    }
  }
  d = best_d;
  BalanceResult best = finish(best_it);
  std::ostringstream os;
  os << "dad_balance: no convergence after " << max_iter << " iterations (residual "
     << best.residual << ", tol " << tol << ")";
  throw BalanceNonConvergence(os.str(), std::move(best));
}

}  // namespace birkhoff
