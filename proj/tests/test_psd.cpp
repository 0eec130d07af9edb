#include "helpers.hpp"

#include "birkhoff/definite.hpp"

using namespace birkhoff;
using namespace birkhoff::test;

namespace {

// Taylor series with scaling and squaring, independent of any
// eigendecomposition.
Matrix series_expm(const Matrix& S) {
  int k = 0;
  double norm = S.norm();
  while (norm > 0.25) {
    norm /= 2;
    ++k;
  }
  const Matrix A = S / std::ldexp(1.0, k);
  Matrix term = Matrix::Identity(S.rows(), S.cols()), sum = term;
  for (int j = 1; j <= 25; ++j) {
    term = term * A / j;
    sum += term;
  }
  for (int i = 0; i < k; ++i) sum = sum * sum;
  return sum;
}

}  // namespace

TEST_CASE("symmetric matrix exponential against the series") {
  Rng rng(30);
  for (Index n : {1, 2, 5, 10}) {
    const Matrix S = symmetric_part(gaussian_matrix(rng, n, n));
    const Matrix E = sym_expm(S);
    CHECK(max_abs(E - series_expm(S)) <= 1e-10 * max_abs(E));
    CHECK(asymmetry(E) == 0.0);
  }
  const Matrix D = Vector(Eigen::Vector3d(1.0, -2.0, 0.5)).asDiagonal();
  CHECK(sym_expm(D)(1, 1) == doctest::Approx(std::exp(-2.0)));
  CHECK(sym_matrix_function(D, [](double x) { return x * x; })(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("exponential of a tangent vector keeps row sums at one") {
  Rng rng(31);
  const DefiniteSymmetricStochasticManifold M;
  for (Index n : {2, 5, 15}) {
    const Matrix X = M.random_point(rng, n);
    Matrix xi = M.random_tangent(rng, X);
    xi /= xi.norm();
    CHECK(max_abs(sym_expm(xi).rowwise().sum() - Vector::Ones(n)) <= 1e-10);
    for (double omega : {1e-3, 1.0, 10.0}) {
      CHECK((psd_retract_expm(X, Matrix::Zero(n, n), omega) - X).norm() <= 1e-12);
      CHECK(max_abs(psd_retract_expm(X, xi, omega).rowwise().sum() - Vector::Ones(n)) <= 1e-10);
    }
  }
}

TEST_CASE("expm retraction is first order") {
  Rng rng(32);
  const DefiniteSymmetricStochasticManifold M;
  for (Index n : {3, 8}) {
    const Matrix X = M.random_point(rng, n);
    const Matrix xi = safe_direction(X, M.random_tangent(rng, X), 1.0) * 0.1;
    std::vector<double> ts{1e-2, 1e-3, 1e-4}, es;
    for (double t : ts)
      es.push_back(((psd_retract_expm(X, t * xi, 1.0) - X) / t - xi).norm());
    CHECK(loglog_slope(ts, es) >= 0.9);
  }
}

TEST_CASE("omega search") {
  Rng rng(33);
  const DefiniteSymmetricStochasticManifold M;
  const Index n = 6;
  const Matrix X = M.random_point(rng, n);
  const Matrix xi = 0.05 * safe_direction(X, M.random_tangent(rng, X), 1.0);
  const OmegaSearchResult r = psd_retract_auto(X, xi);
  CHECK(r.positivity_margin > 0.0);
  CHECK(r.eig_margin > 0.0);
  CHECK(M.check_point(r.retracted).ok);
  CHECK(r.omega == doctest::Approx(std::ldexp(1.0, -r.halvings)));

  OmegaSearchOptions tight;
  tight.max_halvings = 0;
  tight.entry_floor = 10.0;  // no point has entries above 1
  CHECK_THROWS_AS(psd_retract_auto(X, xi, tight), RetractionFailure);
}

TEST_CASE("definite manifold points and checks") {
  Rng rng(34);
  const DefiniteSymmetricStochasticManifold M;
  for (Index n : {2, 5, 20}) {
    const Matrix X = M.random_point(rng, n);
    const CheckResult c = M.check_point(X);
    CHECK(c.ok);
    CHECK(c.min_eigenvalue > 0.0);
    CHECK(min_eigenvalue(X) == doctest::Approx(c.min_eigenvalue));
  }
  Matrix Y(2, 2);
  Y << 0.2, 0.8, 0.8, 0.2;  // eigenvalues 1 and -0.6
  CHECK(SymmetricStochasticManifold().check_point(Y).ok);
  CHECK_FALSE(M.check_point(Y).ok);
  CHECK(M.default_retraction() == RetractionKind::ExpmAuto);
  CHECK(M.retractions().size() == 3);
}

TEST_CASE("retractions on the definite manifold reject indefinite results") {
  Matrix X(2, 2);
  X << 0.6, 0.4, 0.4, 0.6;  // eigenvalues 1 and 0.2
  Matrix xi(2, 2);
  xi << -0.3, 0.3, 0.3, -0.3;  // moves the second eigenvalue to -0.4
  const DefiniteSymmetricStochasticManifold M;
  CHECK_THROWS_AS(M.retract(X, xi, RetractionKind::Canonical), StepTooLargeError);
  // Along a negative eigendirection the exponential step overshoots the
  // canonical one for every omega, so no omega helps.
  CHECK_THROWS_AS(M.retract(X, xi, RetractionKind::ExpmAuto), RetractionFailure);
  CHECK(M.check_point(M.retract(X, 0.1 * xi, RetractionKind::Canonical)).ok);
  CHECK(M.check_point(M.retract(X, 0.1 * xi, RetractionKind::ExpmAuto)).ok);
  CHECK(M.check_point(M.retract(X, -xi, RetractionKind::ExpmAuto)).ok);
}
