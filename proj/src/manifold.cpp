#include "birkhoff/manifold.hpp"

#include "birkhoff/definite.hpp"
#include "birkhoff/doubly_stochastic.hpp"
#include "birkhoff/symmetric.hpp"

namespace birkhoff {

std::string to_string(RetractionKind kind) {
  switch (kind) {
    case RetractionKind::Canonical:
      return "canonical";
    case RetractionKind::Balanced:
      return "balanced";
    case RetractionKind::ExpmAuto:
      return "expm";
  }
  return "unknown";
}

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix M(rows, cols);
  // Fill row by row so draws do not depend on Eigen's storage order.
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = dist(rng);
  return M;
}

Matrix uniform_matrix(Rng& rng, Index rows, Index cols) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double u = dist(rng);
      while (u <= 0.0) u = dist(rng);
      M(i, j) = u;
    }
  return M;
}

Matrix Manifold::random_tangent(Rng& rng, const Matrix& X) const {
  return project_tangent(X, to_embedding(gaussian_matrix(rng, X.rows(), X.cols())));
}

std::unique_ptr<Manifold> make_manifold(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::DoublyStochastic:
      return std::make_unique<DoublyStochasticManifold>();
    case ManifoldKind::SymmetricStochastic:
      return std::make_unique<SymmetricStochasticManifold>();
    case ManifoldKind::DefiniteSymmetricStochastic:
      return std::make_unique<DefiniteSymmetricStochasticManifold>();
  }
  throw DomainError("make_manifold: unknown manifold kind");
}

}  // namespace birkhoff
