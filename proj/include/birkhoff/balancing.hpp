#pragma once

#include "birkhoff/core.hpp"

namespace birkhoff {

/// Output of a diagonal matrix-balancing run.
///
/// `balanced == diag(left_scale) * A * diag(right_scale)`. For Sinkhorn the
/// scales are normalized so that left_scale(0) == 1; for DAD the two scales
/// coincide.
struct BalanceResult {
  Matrix balanced;
  Vector left_scale;
  Vector right_scale;
  int iterations = 0;
  double residual = 0.0;  // max deviation of any row or column sum from 1
};

inline constexpr double kDefaultBalanceTol = 1e-10;

/// 10 * n * ceil(log(n) + 1)
int default_balance_iterations(Index n);

/// Thrown when the iteration budget runs out; carries the best iterate.
class BalanceNonConvergence : public Error {
 public:
  BalanceNonConvergence(const std::string& what, BalanceResult best)
      : Error(what), best_(std::move(best)) {}
  const BalanceResult& best() const { return best_; }

 private:
  BalanceResult best_;
};

/// Alternating row/column normalization. `max_iter <= 0` selects
/// default_balance_iterations(n).
BalanceResult sinkhorn_knopp(const Matrix& A, double tol = kDefaultBalanceTol,
                             int max_iter = 0);

/// Symmetric scaling D A D for symmetric positive A: d is the geometric mean
/// of consecutive iterates of u <- 1 ./ (A u).
BalanceResult dad_balance(const Matrix& A, double tol = kDefaultBalanceTol, int max_iter = 0);

}  // namespace birkhoff
