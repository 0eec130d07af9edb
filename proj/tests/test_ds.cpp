#include "helpers.hpp"

#include "birkhoff/doubly_stochastic.hpp"

using namespace birkhoff;
using namespace birkhoff::test;

namespace {

Matrix two_by_two(double a) {
  Matrix X(2, 2);
  X << a, 1 - a, 1 - a, a;
  return X;
}

Matrix edge() {
  Matrix E(2, 2);
  E << 1, -1, -1, 1;
  return E;
}

// Denoise-type objective with a nonlinear term so the Hessian has both parts.
struct TestObjective {
  Matrix A;
  double value(const Matrix& X) const {
    return (X - A).squaredNorm() + (X.array().square().square()).sum() / 4.0;
  }
  Matrix egrad(const Matrix& X) const { return 2.0 * (X - A) + Matrix(X.array().cube()); }
  Matrix ehess(const Matrix& X, const Matrix& xi) const {
    return 2.0 * xi + Matrix(3.0 * X.array().square() * xi.array());
  }
};

}  // namespace

TEST_CASE("2x2 projection matches the one-dimensional Fisher projection") {
  Rng rng(5);
  const DoublyStochasticManifold M;
  for (double a : {0.5, 0.2, 0.9, 0.01}) {
    const Matrix X = two_by_two(a);
    const Matrix Z = gaussian_matrix(rng, 2, 2);
    const Matrix E = edge();
    const Matrix expected = (fisher_inner(X, Z, E) / fisher_inner(X, E, E)) * E;
    CHECK(max_abs(M.project_tangent(X, Z) - expected) <= 1e-12);
  }
}

TEST_CASE("saddle system residual and minimum norm") {
  Rng rng(6);
  const DoublyStochasticManifold M;
  for (Index n : {2, 3, 5, 10, 20}) {
    const Matrix X = M.random_point(rng, n);
    const Matrix Z = gaussian_matrix(rng, n, n);
    const AlphaBeta ab = ds_solve_alpha_beta(X, Z);
    CHECK(max_abs(ab.alpha + X * ab.beta - Z.rowwise().sum()) <= 1e-8);
    CHECK(max_abs(X.transpose() * ab.alpha + ab.beta - Z.colwise().sum().transpose()) <= 1e-8);
    // (1, -1) spans the kernel; the minimum-norm solution has no component
    // along it.
    CHECK(std::abs(ab.alpha.sum() - ab.beta.sum()) <= 1e-9 * (1.0 + ab.alpha.norm()));
  }
}

TEST_CASE("projection properties on random draws") {
  Rng rng(7);
  const DoublyStochasticManifold M;
  for (Index n : {2, 3, 5, 10, 20}) {
    for (int d = 0; d < 20; ++d) {
      const Matrix X = M.random_point(rng, n);
      const Matrix Z = gaussian_matrix(rng, n, n);
      const Matrix P = M.project_tangent(X, Z);
      CHECK(M.check_tangent(X, P).ok);
      CHECK(max_abs(M.project_tangent(X, P) - P) <= 1e-10);
      const Matrix xi = M.random_tangent(rng, X);
      CHECK(std::abs(M.inner(X, Z - P, xi)) <= 1e-8 * M.norm(X, Z - P) * M.norm(X, xi));
    }
  }
}

TEST_CASE("riemannian gradient satisfies the metric identity") {
  Rng rng(8);
  const DoublyStochasticManifold M;
  for (Index n : {2, 4, 8}) {
    const Matrix X = M.random_point(rng, n);
    const TestObjective f{gaussian_matrix(rng, n, n)};
    const Matrix g = M.riemannian_gradient(X, f.egrad(X));
    CHECK(M.check_tangent(X, g).ok);
    const Matrix xi = safe_direction(X, M.random_tangent(rng, X), 1.0);
    const double fd = fd_directional_derivative([&](const Matrix& Y) { return f.value(Y); }, X, xi);
    CHECK(std::abs(M.inner(X, g, xi) - fd) <= 1e-5 * std::abs(fd));
  }
}

TEST_CASE("pseudo-inverse of I - X X^T") {
  Rng rng(9);
  const DoublyStochasticManifold M;
  for (Index n : {2, 4, 10}) {
    const Matrix X = M.random_point(rng, n);
    const Matrix K = Matrix::Identity(n, n) - X * X.transpose();
    const PseudoInverse P = ds_pinv_i_minus_xxt(X);
    CHECK(P.rank == n - 1);
    CHECK(max_abs(K * P.value * K - K) <= 1e-10);
    CHECK(max_abs(P.value * K * P.value - P.value) <= 1e-8);
    CHECK(max_abs(P.value - P.value.transpose()) <= 1e-12);
    CHECK(max_abs(P.value * Vector::Ones(n)) <= 1e-8);
  }
}

TEST_CASE("pseudo-inverse perturbation is second order") {
  Rng rng(10);
  const DoublyStochasticManifold M;
  for (Index n : {3, 6, 12}) {
    const Matrix X = M.random_point(rng, n);
    Matrix xi = M.random_tangent(rng, X);
    xi /= xi.norm();
    const Matrix eps = ds_pinv_i_minus_xxt(X).value;
    const Matrix edot = ds_epsilon_dot(eps, X, xi);
    std::vector<double> ts{1e-2, 1e-3, 1e-4}, es;
    for (double t : ts) es.push_back((ds_pinv_i_minus_xxt(X + t * xi).value - eps - t * edot).norm());
    CHECK(loglog_slope(ts, es) >= 1.8);
  }
}

TEST_CASE("hessian matches the finite-difference oracle and is self-adjoint") {
  Rng rng(11);
  const DoublyStochasticManifold M;
  for (Index n : {2, 3, 5, 8}) {
    for (int d = 0; d < 5; ++d) {
      const Matrix X = M.random_point(rng, n);
      const TestObjective f{gaussian_matrix(rng, n, n)};
      const Matrix xi = safe_direction(X, M.random_tangent(rng, X), 1e-3);
      const Matrix eta = M.random_tangent(rng, X);
      const HessianOperator H = M.hessian_operator(X, f.egrad(X));
      const Matrix hx = H(xi, f.ehess(X, xi));
      const Matrix he = H(eta, f.ehess(X, eta));
      const auto rgrad = [&](const Matrix& Y) { return M.riemannian_gradient(Y, f.egrad(Y)); };
      const Matrix oracle = hessian_fd_oracle(M, X, xi, rgrad);
      CHECK(M.norm(X, hx - oracle) <= 1e-4 * M.norm(X, oracle));
      CHECK(M.check_tangent(X, hx).ok);
      CHECK(std::abs(M.inner(X, hx, eta) - M.inner(X, xi, he)) <=
            1e-8 * (1.0 + M.norm(X, xi) * M.norm(X, eta)));
    }
  }
}

TEST_CASE("hessian of a linear objective has only curvature terms") {
  Rng rng(12);
  const DoublyStochasticManifold M;
  const Index n = 4;
  const Matrix X = M.random_point(rng, n);
  const Matrix C = Matrix::Constant(n, n, 0.7);
  const Matrix xi = safe_direction(X, M.random_tangent(rng, X), 1e-3);
  const Matrix zero = Matrix::Zero(n, n);
  // c 1 1^T is normal to the tangent space: gradient and Hessian vanish.
  CHECK(max_abs(M.riemannian_gradient(X, C)) <= 1e-12);
  CHECK(max_abs(M.riemannian_hessian(X, C, zero, xi)) <= 1e-10);
  const Matrix G = gaussian_matrix(rng, n, n);
  const auto rgrad = [&](const Matrix& Y) { return M.riemannian_gradient(Y, G); };
  const Matrix oracle = hessian_fd_oracle(M, X, xi, rgrad);
  CHECK(M.norm(X, M.riemannian_hessian(X, G, zero, xi) - oracle) <= 1e-4 * M.norm(X, oracle));
}

TEST_CASE("hessian workspace exposes a consistent chain") {
  Rng rng(13);
  const DoublyStochasticManifold M;
  const Index n = 5;
  const Matrix X = M.random_point(rng, n);
  const TestObjective f{gaussian_matrix(rng, n, n)};
  const Matrix xi = M.random_tangent(rng, X);
  const DsHessian H(X, f.egrad(X));
  const HessianWorkspace w = H.workspace(xi, f.ehess(X, xi));
  CHECK(max_abs(w.hessian - H.apply(xi, f.ehess(X, xi))) <= 1e-12);
  CHECK(max_abs(w.epsilon - ds_pinv_i_minus_xxt(X).value) <= 1e-12);
  CHECK(max_abs(w.epsilon_dot - ds_epsilon_dot(w.epsilon, X, xi)) <= 1e-12);
  CHECK(max_abs(H.gradient() - M.riemannian_gradient(X, f.egrad(X))) <= 1e-12);
}

TEST_CASE("retractions") {
  Rng rng(14);
  const DoublyStochasticManifold M;
  for (Index n : {2, 5, 10}) {
    const Matrix X = M.random_point(rng, n);
    const Matrix zero = Matrix::Zero(n, n);
    CHECK((M.retract(X, zero, RetractionKind::Canonical) - X).norm() <= 1e-12);
    CHECK((M.retract(X, zero, RetractionKind::Balanced) - X).norm() <= 1e-12);

    const Matrix xi = M.random_tangent(rng, X);
    const Matrix big = xi * (10.0 / xi.cwiseQuotient(X).cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(M.retract(X, big, RetractionKind::Canonical), StepTooLargeError);
    const Matrix R = M.retract(X, big, RetractionKind::Balanced);
    CHECK(M.check_point(R).ok);

    // Balanced and canonical agree to second order.
    const Matrix d = safe_direction(X, xi, 1e-2);
    std::vector<double> ts{1e-2, 1e-3, 1e-4}, es;
    for (double t : ts)
      es.push_back((ds_retract_sinkhorn(X, t * d) - ds_retract_canonical(X, t * d)).norm());
    CHECK(loglog_slope(ts, es) >= 1.8);
  }
}

TEST_CASE("balanced retraction reports the exponent clamp") {
  const Matrix X = Matrix::Constant(2, 2, 0.5);
  const BalancedRetraction r = ds_retract_sinkhorn_detailed(X, 100.0 * edge());
  CHECK(r.clamped);
  CHECK(r.point.minCoeff() > 0.0);
  CHECK(row_sum_residual(r.point) <= 1e-10);
  // Entries near exp(-100) are below the positivity floor of the manifold.
  CHECK_THROWS_AS(DoublyStochasticManifold().retract(X, 100.0 * edge(), RetractionKind::Balanced),
                  RetractionFailure);
  CHECK_FALSE(ds_retract_sinkhorn_detailed(X, 0.1 * edge()).clamped);
}

TEST_CASE("point and tangent checks") {
  const DoublyStochasticManifold M;
  Matrix X = Matrix::Constant(3, 3, 1.0 / 3);
  CHECK(M.check_point(X).ok);
  X(0, 0) += 1e-6;
  CHECK_FALSE(M.check_point(X).ok);
  Matrix Y(2, 2);
  Y << 1, 0, 0, 1;
  CHECK_FALSE(M.check_point(Y).ok);
  CHECK(M.check_tangent(Matrix::Constant(2, 2, 0.5), edge()).ok);
  CHECK_FALSE(M.check_tangent(Matrix::Constant(2, 2, 0.5), Matrix::Identity(2, 2)).ok);
  CHECK(M.dimension(5) == 16);
  Rng rng(1);
  CHECK_THROWS_AS(M.random_point(rng, 0), DomainError);
}
