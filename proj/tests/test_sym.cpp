#include "helpers.hpp"

#include "birkhoff/symmetric.hpp"

using namespace birkhoff;
using namespace birkhoff::test;

namespace {

struct TestObjective {
  Matrix A;  // symmetric
  double value(const Matrix& X) const {
    return (X - A).squaredNorm() + (X.array().square().square()).sum() / 4.0;
  }
  Matrix egrad(const Matrix& X) const { return 2.0 * (X - A) + Matrix(X.array().cube()); }
  Matrix ehess(const Matrix& X, const Matrix& xi) const {
    return 2.0 * xi + Matrix(3.0 * X.array().square() * xi.array());
  }
};

Matrix sym_gaussian(Rng& rng, Index n) { return symmetric_part(gaussian_matrix(rng, n, n)); }

}  // namespace

TEST_CASE("2x2 projection matches the one-dimensional Fisher projection") {
  Rng rng(20);
  const SymmetricStochasticManifold M;
  Matrix E(2, 2);
  E << 1, -1, -1, 1;
  for (double a : {0.5, 0.3, 0.95}) {
    Matrix X(2, 2);
    X << a, 1 - a, 1 - a, a;
    const Matrix Z = sym_gaussian(rng, 2);
    const Matrix expected = (fisher_inner(X, Z, E) / fisher_inner(X, E, E)) * E;
    CHECK(max_abs(M.project_tangent(X, Z) - expected) <= 1e-12);
  }
}

TEST_CASE("alpha solves (I + X) alpha = Z 1") {
  Rng rng(21);
  const SymmetricStochasticManifold M;
  for (Index n : {2, 5, 20}) {
    const Matrix X = M.random_point(rng, n);
    const Matrix Z = sym_gaussian(rng, n);
    const Vector a = sym_solve_alpha(X, Z);
    CHECK(max_abs((Matrix::Identity(n, n) + X) * a - Z.rowwise().sum()) <= 1e-10);
  }
}

TEST_CASE("symmetric inputs: doubly stochastic and symmetric projections agree") {
  Rng rng(22);
  const SymmetricStochasticManifold M;
  for (Index n : {2, 3, 5, 10, 20}) {
    for (int d = 0; d < 10; ++d) {
      const Matrix X = M.random_point(rng, n);
      const Matrix Z = sym_gaussian(rng, n);
      CHECK(max_abs(ds_project_tangent(X, Z) - sym_project_tangent(X, Z)) <= 1e-8);
    }
  }
}

TEST_CASE("projection properties on random draws") {
  Rng rng(23);
  const SymmetricStochasticManifold M;
  for (Index n : {2, 3, 5, 10, 20}) {
    for (int d = 0; d < 20; ++d) {
      const Matrix X = M.random_point(rng, n);
      const Matrix Z = sym_gaussian(rng, n);
      const Matrix P = M.project_tangent(X, Z);
      CHECK(M.check_tangent(X, P).ok);
      CHECK(asymmetry(P) == 0.0);
      CHECK(max_abs(M.project_tangent(X, P) - P) <= 1e-10);
      const Matrix xi = M.random_tangent(rng, X);
      CHECK(std::abs(M.inner(X, Z - P, xi)) <= 1e-8 * M.norm(X, Z - P) * M.norm(X, xi));
    }
  }
}

TEST_CASE("gradient identity and hessian oracle") {
  Rng rng(24);
  const SymmetricStochasticManifold M;
  for (Index n : {2, 3, 6, 10}) {
    for (int d = 0; d < 4; ++d) {
      const Matrix X = M.random_point(rng, n);
      const TestObjective f{sym_gaussian(rng, n)};
      const Matrix g = M.riemannian_gradient(X, f.egrad(X));
      const Matrix xi1 = safe_direction(X, M.random_tangent(rng, X), 1.0);
      const double fd =
          fd_directional_derivative([&](const Matrix& Y) { return f.value(Y); }, X, xi1);
      CHECK(std::abs(M.inner(X, g, xi1) - fd) <= 1e-5 * std::abs(fd));

      const Matrix xi = safe_direction(X, M.random_tangent(rng, X), 1e-3);
      const Matrix eta = M.random_tangent(rng, X);
      const HessianOperator H = M.hessian_operator(X, f.egrad(X));
      const Matrix hx = H(xi, f.ehess(X, xi));
      const auto rgrad = [&](const Matrix& Y) { return M.riemannian_gradient(Y, f.egrad(Y)); };
      const Matrix oracle = hessian_fd_oracle(M, X, xi, rgrad);
      CHECK(M.norm(X, hx - oracle) <= 1e-4 * M.norm(X, oracle));
      CHECK(M.check_tangent(X, hx).ok);
      const Matrix he = H(eta, f.ehess(X, eta));
      CHECK(std::abs(M.inner(X, hx, eta) - M.inner(X, xi, he)) <=
            1e-8 * (1.0 + M.norm(X, xi) * M.norm(X, eta)));
    }
  }
}

TEST_CASE("linear objective along c 1 1^T has zero gradient and Hessian") {
  Rng rng(25);
  const SymmetricStochasticManifold M;
  const Matrix X = M.random_point(rng, 5);
  const Matrix C = Matrix::Constant(5, 5, -1.3);
  const Matrix xi = M.random_tangent(rng, X);
  CHECK(max_abs(M.riemannian_gradient(X, C)) <= 1e-12);
  CHECK(max_abs(sym_riemannian_hessian(X, C, Matrix::Zero(5, 5), xi)) <= 1e-10);
}

TEST_CASE("DAD retraction") {
  Rng rng(26);
  const SymmetricStochasticManifold M;
  for (Index n : {2, 4, 12}) {
    const Matrix X = M.random_point(rng, n);
    CHECK((M.retract(X, Matrix::Zero(n, n), RetractionKind::Balanced) - X).norm() <= 1e-12);
    const Matrix xi = M.random_tangent(rng, X);
    const Matrix R = sym_retract_dad(X, safe_direction(X, xi, 1.0) * 3.0);
    CHECK(M.check_point(R).ok);
    const Matrix d = safe_direction(X, xi, 1e-2);
    std::vector<double> ts{1e-2, 1e-3, 1e-4}, es;
    for (double t : ts) es.push_back((sym_retract_dad(X, t * d) - sym_retract_canonical(X, t * d)).norm());
    CHECK(loglog_slope(ts, es) >= 1.8);
  }
}

TEST_CASE("symmetric manifold rejects asymmetric input") {
  const SymmetricStochasticManifold M;
  Matrix X = Matrix::Constant(3, 3, 1.0 / 3);
  Matrix Z = Matrix::Zero(3, 3);
  Z(0, 1) = 1.0;
  CHECK_THROWS_AS(sym_project_tangent(X, Z), DomainError);
  CHECK_THROWS_AS(sym_riemannian_gradient(X, Z), DomainError);
  Matrix Xa = X;
  Xa(0, 1) += 0.01;
  Xa(0, 2) -= 0.01;
  CHECK_FALSE(M.check_point(Xa).ok);
  CHECK(M.check_point(X).ok);
  CHECK(M.dimension(5) == 10);
  CHECK(M.to_embedding(Z) == symmetric_part(Z));
}
