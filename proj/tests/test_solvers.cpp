#include "helpers.hpp"

#include "birkhoff/definite.hpp"
#include "birkhoff/problems.hpp"
#include "birkhoff/solvers.hpp"

#include <Eigen/Dense>

using namespace birkhoff;
using namespace birkhoff::test;

namespace {

const std::vector<SolverKind>& all_solvers() {
  static const std::vector<SolverKind> s = {SolverKind::GradientDescent,
                                            SolverKind::ConjugateGradient, SolverKind::Newton,
                                            SolverKind::TrustRegion};
  return s;
}

Matrix start_point(const Manifold& M, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return M.random_point(rng, n);
}

}  // namespace

TEST_CASE("solver options validation") {
  SolverOptions o;
  CHECK_NOTHROW(o.validate());
  o.ls.c1 = 0.5;
  o.ls.c2 = 0.4;
  CHECK_THROWS_AS(o.validate(), DomainError);
  o = {};
  o.grad_tol = 0.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
}

TEST_CASE("armijo line search") {
  const DoublyStochasticManifold M;
  const Index n = 6;
  const DenoiseInstance inst = make_denoise_instance(M, n, 40);
  const Objective f = denoise_objective(inst.A);
  const Matrix X = start_point(M, n, 41);
  const Matrix g = M.riemannian_gradient(X, f.egrad(X));
  const double fX = f.value(X);
  SolverOptions o;
  const LineSearchResult r = armijo_linesearch(M, X, f, -g, g, fX, 1.0, o);
  CHECK(r.step > 0.0);
  CHECK(r.cost <= fX - o.ls.c1 * r.step * M.inner(X, g, g) + 1e-15);
  CHECK(M.check_point(r.point).ok);
  CHECK_THROWS_AS(armijo_linesearch(M, X, f, g, g, fX, 1.0, o), PreconditionError);

  o.ls.wolfe = true;
  const LineSearchResult w = armijo_linesearch(M, X, f, -g, g, fX, 1.0, o);
  CHECK(w.cost < fX);
}

TEST_CASE("every solver reaches the denoising optimum on every manifold") {
  for (ManifoldKind kind : all_kinds()) {
    const auto M = make_manifold(kind);
    const Index n = 8;
    const DenoiseInstance inst = make_denoise_instance(*M, n, 42);
    const Objective f = denoise_objective(inst.A);
    const Matrix X0 = start_point(*M, n, 43);
    Matrix reference;
    for (SolverKind s : all_solvers()) {
      CAPTURE(to_string(kind));
      CAPTURE(to_string(s));
      SolverOptions o;
      o.grad_tol = 1e-9;
      o.max_iter = 5000;
      const SolverReport r = run_solver(s, *M, f, X0, o);
      CHECK(r.status == SolverStatus::Converged);
      CHECK(r.final_grad_norm < 1e-9);
      CHECK(M->check_point(r.final_point.matrix).ok);
      CHECK(r.final_point.kind == kind);
      if (reference.size() == 0)
        reference = r.final_point.matrix;
      else
        CHECK((r.final_point.matrix - reference).norm() <= 1e-7);
    }
  }
}

TEST_CASE("doubly stochastic denoising agrees with Dykstra") {
  const DoublyStochasticManifold M;
  const Index n = 10;
  const DenoiseInstance inst = make_denoise_instance(M, n, 44);
  const DykstraResult d = dykstra_birkhoff_projection(inst.A, 1e-12);
  SolverOptions o;
  o.grad_tol = 1e-10;
  const SolverReport r = trust_region(M, denoise_objective(inst.A), start_point(M, n, 45), o);
  CHECK(r.status == SolverStatus::Converged);
  CHECK((r.final_point.matrix - d.X).norm() <= 1e-7);
}

TEST_CASE("iterates stay feasible and trace costs are exact") {
  for (ManifoldKind kind : all_kinds()) {
    const auto M = make_manifold(kind);
    const Index n = 7;
    const DenoiseInstance inst = make_denoise_instance(*M, n, 46);
    const Objective f = denoise_objective(inst.A);
    for (SolverKind s : all_solvers()) {
      CAPTURE(to_string(kind));
      CAPTURE(to_string(s));
      SolverOptions o;
      o.max_iter = 60;
      int calls = 0;
      bool feasible = true, exact = true;
      o.callback = [&](const TraceRecord& t, const Matrix& X) {
        ++calls;
        feasible = feasible && M->check_point(X).ok;
        exact = exact && t.cost == f.value(X);
      };
      const SolverReport r = run_solver(s, *M, f, start_point(*M, n, 47), o);
      CHECK(feasible);
      CHECK(exact);
      CHECK(calls == static_cast<int>(r.trace.size()));
      for (std::size_t i = 1; i < r.trace.size(); ++i)
        if (r.trace[i].accepted) CHECK(r.trace[i].cost <= r.trace[i - 1].cost);
    }
  }
}

TEST_CASE("timing off gives reproducible traces") {
  const SymmetricStochasticManifold M;
  const DenoiseInstance inst = make_denoise_instance(M, 9, 48);
  SolverOptions o;
  o.timing = false;
  const Matrix X0 = start_point(M, 9, 49);
  const SolverReport a = conjugate_gradient(M, denoise_objective(inst.A), X0, o);
  const SolverReport b = conjugate_gradient(M, denoise_objective(inst.A), X0, o);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].cost == b.trace[i].cost);
    CHECK(a.trace[i].elapsed_s == 0.0);
  }
  CHECK(a.final_point.matrix == b.final_point.matrix);
}

TEST_CASE("newton system against a dense solve in a tangent basis") {
  for (ManifoldKind kind : all_kinds()) {
    const auto M = make_manifold(kind);
    for (Index n : {3, 5}) {
      CAPTURE(to_string(kind));
      CAPTURE(n);
      const DenoiseInstance inst = make_denoise_instance(*M, n, 50 + n);
      const Objective f = denoise_objective(inst.A);
      // Near the optimum the Riemannian Hessian is positive definite.
      SolverOptions o;
      o.grad_tol = 1e-4;
      const Matrix X = conjugate_gradient(*M, f, start_point(*M, n, 51), o).final_point.matrix;
      const Matrix egrad = f.egrad(X);
      const Matrix g = M->riemannian_gradient(X, egrad);
      const HessianOperator H = M->hessian_operator(X, egrad);
      auto ehess = [&f, &X](const Matrix& xi) { return f.ehess(X, xi); };

      const std::vector<Matrix> B = fisher_orthonormal_tangent_basis(X, is_symmetric_kind(kind));
      REQUIRE(static_cast<Index>(B.size()) == M->dimension(n));
      const Index d = static_cast<Index>(B.size());
      Matrix Hd(d, d);
      Vector gd(d);
      for (Index j = 0; j < d; ++j) {
        const Matrix HB = H(B[j], ehess(B[j]));
        for (Index i = 0; i < d; ++i) Hd(i, j) = M->inner(X, B[i], HB);
        gd(j) = M->inner(X, B[j], g);
      }
      const Vector c = Hd.ldlt().solve(-gd);
      Matrix oracle = Matrix::Zero(n, n);
      for (Index j = 0; j < d; ++j) oracle += c(j) * B[j];

      const NewtonSystemResult r =
          solve_newton_system(*M, X, H, ehess, g, 1e-14 * M->norm(X, g), 10 * d);
      CHECK_FALSE(r.negative_curvature);
      CHECK(M->norm(X, r.xi - oracle) <= 1e-8 * M->norm(X, oracle));
      CHECK(M->norm(X, H(r.xi, ehess(r.xi)) + g) <= 1e-9 * M->norm(X, g));
    }
  }
}

TEST_CASE("conjugate gradient beta rules") {
  const Matrix X = Matrix::Constant(2, 2, 0.5);
  Matrix gp(2, 2), g(2, 2), d(2, 2);
  gp << 1, -1, -1, 1;
  g << 2, -2, -2, 2;
  d << -1, 1, 1, -1;
  // <a, b>_X = 2 sum a b here: |gp|^2 = 8, |g|^2 = 32, <g, g - gp> = 16,
  // <d, g - gp> = -8.
  CHECK(cg_beta(CgBetaRule::FletcherReeves, X, g, X, gp, gp, d) == doctest::Approx(4.0));
  CHECK(cg_beta(CgBetaRule::PolakRibierePlus, X, g, X, gp, gp, d) == doctest::Approx(2.0));
  CHECK(cg_beta(CgBetaRule::HestenesStiefel, X, g, X, gp, gp, d) == doctest::Approx(0.0));
  CHECK(cg_beta(CgBetaRule::PolakRibierePlus, X, gp, X, g, g, d) == 0.0);
  CHECK(cg_beta(CgBetaRule::FletcherReeves, X, g, X, Matrix::Zero(2, 2), gp, d) == 0.0);

  for (CgBetaRule rule : {CgBetaRule::FletcherReeves, CgBetaRule::PolakRibierePlus,
                          CgBetaRule::HestenesStiefel}) {
    CAPTURE(to_string(rule));
    const DoublyStochasticManifold M;
    const DenoiseInstance inst = make_denoise_instance(M, 10, 52);
    SolverOptions o;
    o.cg.rule = rule;
    o.grad_tol = 1e-8;
    CHECK(conjugate_gradient(M, denoise_objective(inst.A), start_point(M, 10, 53), o).status ==
          SolverStatus::Converged);
  }
}

TEST_CASE("gradient certification") {
  const DoublyStochasticManifold M;
  const DenoiseInstance inst = make_denoise_instance(M, 6, 54);
  Objective f = denoise_objective(inst.A);
  const Matrix X = start_point(M, 6, 55);
  Rng rng(1);
  const CertificationResult good = certify_gradient(M, f, X, rng);
  CHECK(good.ok);
  CHECK(good.max_rel_err < 1e-7);

  Objective bad = f;
  bad.egrad = [g = f.egrad](const Matrix& Y) { return Matrix(1.1 * g(Y)); };
  CHECK_FALSE(certify_gradient(M, bad, X, rng).ok);
  SolverOptions o;
  o.certify_gradient = true;
  CHECK_THROWS_AS(gradient_descent(M, bad, X, o), PreconditionError);
  CHECK_NOTHROW(gradient_descent(M, f, X, o));
}

TEST_CASE("second-order solvers require a Hessian") {
  const DoublyStochasticManifold M;
  Objective f = denoise_objective(make_denoise_instance(M, 4, 56).A);
  f.ehess = nullptr;
  const Matrix X = start_point(M, 4, 57);
  CHECK_THROWS_AS(newton(M, f, X), PreconditionError);
  CHECK_THROWS_AS(trust_region(M, f, X), PreconditionError);
  CHECK_NOTHROW(conjugate_gradient(M, f, X));
}

TEST_CASE("solvers reject infeasible starts") {
  const DoublyStochasticManifold M;
  const Objective f = denoise_objective(Matrix::Constant(3, 3, 1.0 / 3));
  CHECK_THROWS(gradient_descent(M, f, Matrix::Constant(3, 3, 0.5)));
}

TEST_CASE("explicit retraction choices") {
  const DefiniteSymmetricStochasticManifold P;
  const DenoiseInstance inst = make_denoise_instance(P, 6, 58);
  for (RetractionChoice c : {RetractionChoice::Auto, RetractionChoice::Canonical,
                             RetractionChoice::Balanced, RetractionChoice::ExpmAuto}) {
    CAPTURE(to_string(c));
    SolverOptions o;
    o.retraction = c;
    o.grad_tol = 1e-8;
    const SolverReport r = conjugate_gradient(P, denoise_objective(inst.A), start_point(P, 6, 59), o);
    CHECK(r.status == SolverStatus::Converged);
    CHECK(P.check_point(r.final_point.matrix).ok);
  }
  const DoublyStochasticManifold D;
  SolverOptions o;
  o.retraction = RetractionChoice::ExpmAuto;
  CHECK_THROWS_AS(conjugate_gradient(D, denoise_objective(make_denoise_instance(D, 4, 60).A),
                                     start_point(D, 4, 61), o),
                  PreconditionError);
}
