#include "birkhoff/definite.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace birkhoff {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eig_or_throw(const Matrix& S, const char* who) {
  require_square(S, who);
  require_finite(S, who);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(S));
  if (es.info() != Eigen::Success) {
    throw NumericalError(std::string(who) + ": eigensolver failed", 0.0);
  }
  return es;
}

Matrix reassemble(const Eigen::SelfAdjointEigenSolver<Matrix>& es, const Vector& f) {
  const Matrix& U = es.eigenvectors();
  return symmetric_part(U * f.asDiagonal() * U.transpose());
}

}  // namespace

Matrix sym_matrix_function(const Matrix& S, const std::function<double(double)>& f) {
  const auto es = eig_or_throw(S, "sym_matrix_function");
  return reassemble(es, es.eigenvalues().unaryExpr(f));
}

Matrix sym_expm(const Matrix& S) {
  const auto es = eig_or_throw(S, "sym_expm");
  return reassemble(es, es.eigenvalues().array().exp().matrix());
}

double min_eigenvalue(const Matrix& X) {
  require_square(X, "min_eigenvalue");
  require_finite(X, "min_eigenvalue");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(X), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigensolver failed", 0.0);
  return es.eigenvalues()(0);
}

Matrix psd_retract_expm(const Matrix& X, const Matrix& xi, double omega) {
  require_same_shape(X, xi, "psd_retract_expm");
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("psd_retract_expm: omega must be positive and finite");
  }
  const auto es = eig_or_throw(xi, "psd_retract_expm");
  // (I - e^{-omega xi}) / omega with expm1 so small omega keeps precision.
  const Vector f = es.eigenvalues().unaryExpr(
      [omega](double l) { return -std::expm1(-omega * l) / omega; });
  return symmetric_part(X) + reassemble(es, f);
}

OmegaSearchResult psd_retract_auto(const Matrix& X, const Matrix& xi,
                                   const OmegaSearchOptions& opts) {
  require_same_shape(X, xi, "psd_retract_auto");
  if (!(opts.omega0 > 0.0) || !(opts.factor > 0.0 && opts.factor < 1.0)) {
    throw DomainError("psd_retract_auto: need omega0 > 0 and 0 < factor < 1");
  }
  const double eig_floor = opts.eig_floor_rel * X.trace() / static_cast<double>(X.rows());
  const auto es = eig_or_throw(xi, "psd_retract_auto");
  const Vector& lam = es.eigenvalues();

  double omega = opts.omega0;
  double last_entry = 0.0, last_eig = 0.0;
  for (int k = 0; k <= opts.max_halvings; ++k, omega *= opts.factor) {
    const double w = omega;
    const Vector f = lam.unaryExpr([w](double l) { return -std::expm1(-w * l) / w; });
    Matrix Y = symmetric_part(X) + reassemble(es, f);
    last_entry = Y.minCoeff();
    if (last_entry < opts.entry_floor) continue;
    last_eig = min_eigenvalue(Y);
    if (last_eig < eig_floor) continue;
    OmegaSearchResult out;
    out.omega = omega;
    out.retracted = std::move(Y);
    out.positivity_margin = last_entry;
    out.eig_margin = last_eig;
    out.halvings = k;
    return out;
  }
  std::ostringstream os;
  os << "psd_retract_auto: no feasible omega after " << opts.max_halvings
     << " halvings (last min entry " << last_entry << ", last min eigenvalue " << last_eig
     << ")";
  throw RetractionFailure(os.str());
}

Matrix DefiniteSymmetricStochasticManifold::retract(const Matrix& X, const Matrix& xi,
                                                    RetractionKind kind) const {
  if (kind == RetractionKind::ExpmAuto) return psd_retract_auto(X, xi, omega_).retracted;
  Matrix Y = SymmetricStochasticManifold::retract(X, xi, kind);
  const double floor = omega_.eig_floor_rel * Y.trace() / static_cast<double>(Y.rows());
  const double lmin = min_eigenvalue(Y);
  if (!(lmin >= floor)) {
    std::ostringstream os;
    os << "psd: retracted point is not positive definite (min eigenvalue " << lmin << ")";
    throw StepTooLargeError(os.str(), Y.minCoeff());
  }
  return Y;
}

Matrix DefiniteSymmetricStochasticManifold::random_point(Rng& rng, Index n) const {
  const Matrix S = SymmetricStochasticManifold::random_point(rng, n);
  const double c = kDefaultShift + std::max(0.0, -min_eigenvalue(S));
  return symmetric_part((S + c * Matrix::Identity(n, n)) / (1.0 + c));
}

CheckResult DefiniteSymmetricStochasticManifold::check_point(const Matrix& X,
                                                             const Tolerances& tol) const {
  CheckResult r = SymmetricStochasticManifold::check_point(X, tol);
  if (X.rows() != X.cols() || X.rows() == 0 || !X.allFinite()) return r;
  r.min_eigenvalue = min_eigenvalue(X);
  if (r.ok && !(r.min_eigenvalue > 0.0)) {
    r.ok = false;
    r.reason = "not positive definite";
  }
  return r;
}

}  // namespace birkhoff
