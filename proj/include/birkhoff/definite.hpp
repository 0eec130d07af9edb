#pragma once

// Definite symmetric multinomial manifold SP_n^+ = { X in SP_n : X > 0 }.
// Tangent space, gradient and Hessian are those of SP_n; this header adds the
// matrix-exponential retraction X + (I - e^{-omega xi}) / omega.

#include "birkhoff/symmetric.hpp"

namespace birkhoff {

/// U exp(Lambda) U^T for symmetric S.
Matrix sym_expm(const Matrix& S);

/// U f(Lambda) U^T for symmetric S; the output is exactly symmetric.
Matrix sym_matrix_function(const Matrix& S, const std::function<double(double)>& f);

/// Smallest eigenvalue of the symmetric part of X.
double min_eigenvalue(const Matrix& X);

/// X + (1/omega) I - (1/omega) e^{-omega xi}. Feasibility is not checked.
Matrix psd_retract_expm(const Matrix& X, const Matrix& xi, double omega);

struct OmegaSearchOptions {
  double omega0 = 1.0;
  double factor = 0.5;
  int max_halvings = 60;
  double entry_floor = 1e-13;
  /// Minimum eigenvalue must be >= eig_floor_rel * trace(X) / n.
  double eig_floor_rel = 1e-12;
};

struct OmegaSearchResult {
  double omega = 0.0;
  Matrix retracted;
  double positivity_margin = 0.0;  // min entry
  double eig_margin = 0.0;         // min eigenvalue
  int halvings = 0;
};

/// Geometric search omega = omega0 * factor^k, k = 0, 1, ..., until both the
/// entry and eigenvalue margins pass. Throws RetractionFailure when the budget
/// is exhausted.
OmegaSearchResult psd_retract_auto(const Matrix& X, const Matrix& xi,
                                   const OmegaSearchOptions& opts = {});

class DefiniteSymmetricStochasticManifold final : public SymmetricStochasticManifold {
 public:
  /// Diagonal shift c used by random_point; see random_point().
  static constexpr double kDefaultShift = 0.1;

  explicit DefiniteSymmetricStochasticManifold(BalancedRetractionOptions balance = {},
                                               OmegaSearchOptions omega = {})
      : SymmetricStochasticManifold(balance), omega_(omega) {}

  ManifoldKind kind() const override { return ManifoldKind::DefiniteSymmetricStochastic; }
  Matrix retract(const Matrix& X, const Matrix& xi, RetractionKind kind) const override;
  std::vector<RetractionKind> retractions() const override {
    return {RetractionKind::Canonical, RetractionKind::Balanced, RetractionKind::ExpmAuto};
  }
  RetractionKind default_retraction() const override { return RetractionKind::ExpmAuto; }

  /// S = DAD(random symmetric), then X = (S + c I) / (1 + c) with
  /// c = kDefaultShift + max(0, -lambda_min(S)).
  Matrix random_point(Rng& rng, Index n) const override;
  CheckResult check_point(const Matrix& X, const Tolerances& tol = {}) const override;

 private:
  OmegaSearchOptions omega_;
};

}  // namespace birkhoff
