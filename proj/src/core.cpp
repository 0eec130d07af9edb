#include "birkhoff/core.hpp"

#include <cmath>
#include <sstream>

namespace birkhoff {

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::DoublyStochastic:
      return "ds";
    case ManifoldKind::SymmetricStochastic:
      return "sym";
    case ManifoldKind::DefiniteSymmetricStochastic:
      return "psd";
  }
  return "unknown";
}

namespace {

std::string shape_of(const Matrix& A) {
  std::ostringstream os;
  os << A.rows() << "x" << A.cols();
  return os.str();
}

}  // namespace

void require_square(const Matrix& A, const char* who) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw ShapeError(std::string(who) + ": expected a nonempty square matrix, got " +
                     shape_of(A));
  }
}

void require_same_shape(const Matrix& A, const Matrix& B, const char* who) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw ShapeError(std::string(who) + ": shape mismatch " + shape_of(A) + " vs " +
                     shape_of(B));
  }
}

void require_finite(const Matrix& A, const char* who) {
  if (!A.allFinite()) {
    throw DomainError(std::string(who) + ": non-finite entry");
  }
}

void require_positive(const Matrix& X, const char* who, double floor) {
  const double m = X.minCoeff();
  if (!(m > floor)) {
    std::ostringstream os;
    os << who << ": entries must be > " << floor << ", min entry is " << m;
    throw DomainError(os.str());
  }
}

double asymmetry(const Matrix& A) {
  if (A.rows() != A.cols()) return std::numeric_limits<double>::infinity();
  return (A - A.transpose()).cwiseAbs().maxCoeff();
}

Matrix symmetric_part(const Matrix& A) { return 0.5 * (A + A.transpose()); }

double row_sum_residual(const Matrix& A) {
  return (A.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double col_sum_residual(const Matrix& A) {
  return (A.colwise().sum().array() - 1.0).abs().maxCoeff();
}

double fisher_inner(const Matrix& X, const Matrix& xi, const Matrix& eta) {
  require_same_shape(X, xi, "fisher_inner");
  require_same_shape(X, eta, "fisher_inner");
  require_positive(X, "fisher_inner");
  return (xi.array() * eta.array() / X.array()).sum();
}

double fisher_norm(const Matrix& X, const Matrix& xi) {
  return std::sqrt(fisher_inner(X, xi, xi));
}

double fd_directional_derivative(const std::function<double(const Matrix&)>& f,
                                 const Matrix& X, const Matrix& xi, double h) {
  require_same_shape(X, xi, "fd_directional_derivative");
  if (!(h > 0.0)) throw DomainError("fd_directional_derivative: step must be positive");
  Matrix plus = X + h * xi;
  Matrix minus = X - h * xi;
  if (!(plus.minCoeff() > 0.0) || !(minus.minCoeff() > 0.0)) {
    throw DomainError("fd_directional_derivative: step leaves the positive orthant");
  }
  return (f(plus) - f(minus)) / (2.0 * h);
}

}  // namespace birkhoff
