#pragma once

// Shared types for optimization over the doubly stochastic family of
// multinomial manifolds: dense matrix aliases, the error hierarchy, the
// Fisher information metric and a finite-difference oracle.

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace birkhoff {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ManifoldKind {
  DoublyStochastic,
  SymmetricStochastic,
  DefiniteSymmetricStochastic,
};

std::string to_string(ManifoldKind kind);

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An input lies outside the domain of the operation (nonpositive entry,
/// asymmetric matrix, non-finite value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition was violated (e.g. a non-descent direction).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A linear solve or decomposition produced an unusable result.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The canonical retraction X + xi left the positive orthant; the caller
/// should shrink the step.
class StepTooLargeError : public Error {
 public:
  StepTooLargeError(const std::string& what, double min_entry)
      : Error(what), min_entry_(min_entry) {}
  double min_entry() const { return min_entry_; }

 private:
  double min_entry_;
};

/// A retraction could not produce a feasible point (e.g. the omega search of
/// the matrix-exponential retraction ran out of halvings).
class RetractionFailure : public Error {
 public:
  using Error::Error;
};

/// Thin value wrapper pairing a matrix with the manifold it belongs to.
/// Construction does not validate; use Manifold::check_point for that.
struct ManifoldPoint {
  Matrix matrix;
  ManifoldKind kind = ManifoldKind::DoublyStochastic;
};

/// Objective callbacks. `ehess` is optional; when present it must return the
/// Euclidean Hessian applied to a direction. `hessian_smooth_at`, when set,
/// reports whether `ehess` is meaningful at a given point (nonsmooth
/// objectives use it to turn second-order solvers away).
struct Objective {
  std::function<double(const Matrix&)> value;
  std::function<Matrix(const Matrix&)> egrad;
  std::function<Matrix(const Matrix&, const Matrix&)> ehess;
  std::function<bool(const Matrix&)> hessian_smooth_at;

  bool has_hessian() const { return static_cast<bool>(ehess); }
  bool hessian_available(const Matrix& X) const {
    return has_hessian() && (!hessian_smooth_at || hessian_smooth_at(X));
  }
};

// ---------------------------------------------------------------------------
// Validation helpers.

void require_square(const Matrix& A, const char* who);
void require_same_shape(const Matrix& A, const Matrix& B, const char* who);
void require_finite(const Matrix& A, const char* who);
void require_positive(const Matrix& X, const char* who, double floor = 0.0);

/// max_ij |A_ij - A_ji|
double asymmetry(const Matrix& A);
Matrix symmetric_part(const Matrix& A);

/// max_i |A 1 - 1|_i and max_j |A^T 1 - 1|_j
double row_sum_residual(const Matrix& A);
double col_sum_residual(const Matrix& A);

// ---------------------------------------------------------------------------
// Fisher information metric <xi, eta>_X = sum_ij xi_ij eta_ij / X_ij.

double fisher_inner(const Matrix& X, const Matrix& xi, const Matrix& eta);
double fisher_norm(const Matrix& X, const Matrix& xi);

inline constexpr double kDefaultFdStep = 1e-6;

/// Central difference (f(X + h xi) - f(X - h xi)) / 2h. Test and
/// verification use only; no solver calls it.
double fd_directional_derivative(const std::function<double(const Matrix&)>& f,
                                 const Matrix& X, const Matrix& xi,
                                 double h = kDefaultFdStep);

}  // namespace birkhoff
