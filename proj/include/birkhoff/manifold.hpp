#pragma once

#include "birkhoff/core.hpp"

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace birkhoff {

enum class RetractionKind {
  Canonical,  // X + xi, rejected when it leaves the positive orthant
  Balanced,   // Sinkhorn (or DAD) balancing of X . exp(xi / X)
  ExpmAuto,   // matrix-exponential retraction with omega search
};

std::string to_string(RetractionKind kind);

using Rng = std::mt19937_64;

/// Thresholds used by check_point / check_tangent. Defaults are the values
/// the test-suite contract is written against.
struct Tolerances {
  double positivity_floor = 1e-14;
  double sum_tol = 1e-10;
  double symmetry_tol = 1e-10;
  double tangent_tol = 1e-10;
};

struct CheckResult {
  bool ok = true;
  double min_entry = 0.0;
  double row_residual = 0.0;
  double col_residual = 0.0;
  double asymmetry = 0.0;
  double min_eigenvalue = 0.0;  // only filled for the definite manifold
  std::string reason;
};

/// Applies the Riemannian Hessian at a fixed base point:
/// (xi, ehess_xi) -> hess f(X)[xi], where ehess_xi = Hess f(X)[xi].
using HessianOperator = std::function<Matrix(const Matrix& xi, const Matrix& ehess_xi)>;

/// Riemannian geometry of one of the multinomial manifolds under the Fisher
/// metric. All methods are const and pure; instances are cheap and stateless.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  std::string name() const { return to_string(kind()); }

  /// Dimension of the tangent space at any point of size n.
  virtual Index dimension(Index n) const = 0;

  double inner(const Matrix& X, const Matrix& xi, const Matrix& eta) const {
    return fisher_inner(X, xi, eta);
  }
  double norm(const Matrix& X, const Matrix& xi) const { return fisher_norm(X, xi); }

  /// Maps an ambient (Euclidean R^{n x n}) matrix into the embedding space of
  /// this manifold: identity for DP_n, symmetric part for the symmetric ones.
  virtual Matrix to_embedding(const Matrix& Z) const = 0;

  virtual Matrix project_tangent(const Matrix& X, const Matrix& Z) const = 0;

  /// Converts the Euclidean gradient (taken in R^{n x n}) to the Riemannian
  /// gradient.
  virtual Matrix riemannian_gradient(const Matrix& X, const Matrix& egrad) const = 0;

  /// Builds a reusable Hessian operator at X. Factorizations depending only
  /// on X and the gradient are computed once.
  virtual HessianOperator hessian_operator(const Matrix& X, const Matrix& egrad) const = 0;

  Matrix riemannian_hessian(const Matrix& X, const Matrix& egrad, const Matrix& ehess_xi,
                            const Matrix& xi) const {
    return hessian_operator(X, egrad)(xi, ehess_xi);
  }

  /// Throws StepTooLargeError when a canonical step leaves the manifold and
  /// RetractionFailure when a balanced or exponential step cannot be
  /// completed; either way a smaller step may succeed.
  virtual Matrix retract(const Matrix& X, const Matrix& xi, RetractionKind kind) const = 0;
  virtual std::vector<RetractionKind> retractions() const = 0;
  virtual RetractionKind default_retraction() const = 0;

  virtual Matrix random_point(Rng& rng, Index n) const = 0;
  /// Gaussian ambient draw followed by project_tangent.
  Matrix random_tangent(Rng& rng, const Matrix& X) const;

  virtual CheckResult check_point(const Matrix& X, const Tolerances& tol = {}) const = 0;
  virtual CheckResult check_tangent(const Matrix& X, const Matrix& xi,
                                    const Tolerances& tol = {}) const = 0;
};

std::unique_ptr<Manifold> make_manifold(ManifoldKind kind);

/// i.i.d. standard normal matrix.
Matrix gaussian_matrix(Rng& rng, Index rows, Index cols);
/// i.i.d. uniform(0, 1) matrix.
Matrix uniform_matrix(Rng& rng, Index rows, Index cols);

}  // namespace birkhoff
