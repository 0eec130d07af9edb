#pragma once

#include "birkhoff/balancing.hpp"
#include "birkhoff/doubly_stochastic.hpp"

#include <string>

namespace birkhoff::detail {

/// Balancing tolerance for random points: a few ulps of the row sums, so
/// that a balanced retraction at a random point starts already converged.
double point_balance_tol(Index n);

/// Fills in the iteration budget of a balanced retraction.
BalancedRetractionOptions resolved(const BalancedRetractionOptions& opts, Index n);

/// X .* exp(clamp(xi ./ X, -clamp, clamp)); `clamped` reports whether the
/// clamp was active.
Matrix exp_scaled_step(const Matrix& X, const Matrix& xi, double clamp, bool& clamped);

/// Runs a balanced retraction for a manifold's retract(): a balancing that
/// runs out of iterations, or a result with entries at the positivity floor,
/// becomes RetractionFailure so that line searches shrink the step.
template <class F>
Matrix guarded_balanced(F&& balance, const char* who) {
  Matrix Y;
  try {
    Y = balance();
  } catch (const BalanceNonConvergence& e) {
    throw RetractionFailure(std::string(who) + ": " + e.what());
  }
  if (!(Y.minCoeff() > Tolerances{}.positivity_floor)) {
    throw RetractionFailure(std::string(who) + ": balanced step underflows the positivity floor");
  }
  return Y;
}

}  // namespace birkhoff::detail
