#include "helpers.hpp"

#include "birkhoff/balancing.hpp"

using namespace birkhoff;
using namespace birkhoff::test;

TEST_CASE("sinkhorn on the 2x2 example") {
  Matrix A(2, 2);
  A << 1, 2, 2, 1;
  const BalanceResult r = sinkhorn_knopp(A);
  Matrix expected(2, 2);
  expected << 1.0 / 3, 2.0 / 3, 2.0 / 3, 1.0 / 3;
  CHECK(max_abs(r.balanced - expected) <= 1e-10);
  CHECK(max_abs(r.left_scale.asDiagonal() * A * r.right_scale.asDiagonal() - r.balanced) <= 1e-14);
  CHECK(r.left_scale(0) == doctest::Approx(1.0));
}

TEST_CASE("sinkhorn and DAD residuals on random positive matrices") {
  Rng rng(3);
  for (Index n : {2, 3, 5, 10, 50, 100, 200}) {
    const Matrix A = uniform_matrix(rng, n, n).array() + 1e-3;
    const BalanceResult s = sinkhorn_knopp(A);
    CHECK(s.residual <= 1e-10);
    CHECK(row_sum_residual(s.balanced) <= 1e-10);
    CHECK(col_sum_residual(s.balanced) <= 1e-10);
    CHECK(max_abs(s.left_scale.asDiagonal() * A * s.right_scale.asDiagonal() - s.balanced) <=
          1e-12);

    const Matrix S = symmetric_part(A);
    const BalanceResult d = dad_balance(S);
    CHECK(d.residual <= 1e-10);
    CHECK(asymmetry(d.balanced) <= 1e-14);
    CHECK(max_abs(d.left_scale - d.right_scale) == 0.0);
    CHECK(max_abs(d.left_scale.asDiagonal() * S * d.left_scale.asDiagonal() - d.balanced) <= 1e-12);
  }
}

TEST_CASE("balancing a balanced matrix is the identity") {
  const Matrix J = Matrix::Constant(4, 4, 0.25);
  CHECK(max_abs(sinkhorn_knopp(J).balanced - J) <= 1e-15);
  CHECK(sinkhorn_knopp(J).iterations == 0);
  CHECK(max_abs(dad_balance(J).balanced - J) <= 1e-15);
}

TEST_CASE("balancing is invariant under diagonal scaling of the input") {
  Rng rng(4);
  const Matrix A = uniform_matrix(rng, 6, 6).array() + 0.1;
  const Vector d1 = uniform_matrix(rng, 6, 1).array() + 0.5;
  const Vector d2 = uniform_matrix(rng, 6, 1).array() + 0.5;
  const Matrix B = d1.asDiagonal() * A * d2.asDiagonal();
  CHECK(max_abs(sinkhorn_knopp(A).balanced - sinkhorn_knopp(B).balanced) <= 1e-10);
}

TEST_CASE("non-convergence reports the best iterate") {
  Matrix A(3, 3);
  A << 1, 1e-6, 1e-6, 1e-6, 1, 1e-6, 1, 1, 1;
  try {
    sinkhorn_knopp(A, 1e-14, 2);
    FAIL("expected BalanceNonConvergence");
  } catch (const BalanceNonConvergence& e) {
    CHECK(e.best().iterations <= 2);
    CHECK(e.best().residual > 1e-14);
    CHECK(e.best().balanced.rows() == 3);
  }
}

TEST_CASE("balancing rejects invalid input") {
  Matrix A = Matrix::Constant(3, 3, 1.0);
  A(1, 2) = 0.0;
  CHECK_THROWS_AS(sinkhorn_knopp(A), DomainError);
  CHECK_THROWS_AS(sinkhorn_knopp(Matrix::Ones(2, 3)), ShapeError);
  Matrix asym = Matrix::Constant(3, 3, 1.0);
  asym(0, 1) = 2.0;
  CHECK_THROWS_AS(dad_balance(asym), DomainError);
  CHECK(default_balance_iterations(10) > 0);
}
