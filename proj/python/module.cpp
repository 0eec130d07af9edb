#include "birkhoff/balancing.hpp"
#include "birkhoff/definite.hpp"
#include "birkhoff/problems.hpp"
#include "birkhoff/solvers.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace birkhoff;

namespace {

ManifoldKind manifold_kind(const std::string& name) {
  if (name == "ds") return ManifoldKind::DoublyStochastic;
  if (name == "sym") return ManifoldKind::SymmetricStochastic;
  if (name == "psd") return ManifoldKind::DefiniteSymmetricStochastic;
  throw py::value_error("unknown manifold '" + name + "' (expected ds, sym or psd)");
}

SolverKind solver_kind(const std::string& name) {
  if (name == "gd") return SolverKind::GradientDescent;
  if (name == "cg") return SolverKind::ConjugateGradient;
  if (name == "newton") return SolverKind::Newton;
  if (name == "tr") return SolverKind::TrustRegion;
  throw py::value_error("unknown solver '" + name + "' (expected gd, cg, newton or tr)");
}

RetractionChoice retraction_choice(const std::string& name) {
  if (name == "auto") return RetractionChoice::Auto;
  if (name == "canonical") return RetractionChoice::Canonical;
  if (name == "balanced") return RetractionChoice::Balanced;
  if (name == "expm") return RetractionChoice::ExpmAuto;
  throw py::value_error("unknown retraction '" + name + "'");
}

RetractionKind retraction_kind(const Manifold& M, const std::string& name) {
  if (name == "default") return M.default_retraction();
  if (name == "canonical") return RetractionKind::Canonical;
  if (name == "balanced") return RetractionKind::Balanced;
  if (name == "expm") return RetractionKind::ExpmAuto;
  throw py::value_error("unknown retraction '" + name + "'");
}

struct PyManifold {
  std::shared_ptr<Manifold> impl;
  explicit PyManifold(const std::string& name) : impl(make_manifold(manifold_kind(name))) {}
};

struct SolverResult {
  Matrix x;
  std::string status;
  int iterations = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  std::vector<double> cost_trace, grad_norm_trace, step_trace;
};

SolverResult to_result(const SolverReport& r) {
  SolverResult out;
  out.x = r.final_point.matrix;
  out.status = to_string(r.status);
  out.iterations = r.iterations;
  out.cost = r.final_cost;
  out.grad_norm = r.final_grad_norm;
  for (const TraceRecord& t : r.trace) {
    out.cost_trace.push_back(t.cost);
    out.grad_norm_trace.push_back(t.grad_norm);
    out.step_trace.push_back(t.step);
  }
  return out;
}

SolverOptions make_options(double tol, int max_iter, const std::string& retraction) {
  SolverOptions o;
  o.grad_tol = tol;
  o.max_iter = max_iter;
  o.retraction = retraction_choice(retraction);
  return o;
}

Objective python_objective(py::function cost, py::function egrad, py::object ehess) {
  Objective f;
  f.value = [cost](const Matrix& X) { return cost(X).cast<double>(); };
  f.egrad = [egrad](const Matrix& X) { return egrad(X).cast<Matrix>(); };
  if (!ehess.is_none()) {
    py::function h = ehess;
    f.ehess = [h](const Matrix& X, const Matrix& xi) { return h(X, xi).cast<Matrix>(); };
  }
  return f;
}

py::tuple balance_tuple(const BalanceResult& r) {
  return py::make_tuple(r.balanced, r.left_scale, r.right_scale, r.iterations);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Manifold optimization over doubly stochastic matrices";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<BalanceNonConvergence>(m, "BalanceNonConvergence", base.ptr());

  py::class_<PyManifold>(m, "Manifold")
      .def(py::init<const std::string&>(), py::arg("name"))
      .def_property_readonly("name", [](const PyManifold& p) { return p.impl->name(); })
      .def("dimension", [](const PyManifold& p, Index n) { return p.impl->dimension(n); })
      .def("inner", [](const PyManifold& p, const Matrix& X, const Matrix& a, const Matrix& b) {
        return p.impl->inner(X, a, b);
      })
      .def("norm", [](const PyManifold& p, const Matrix& X, const Matrix& a) { return p.impl->norm(X, a); })
      .def("project_tangent",
           [](const PyManifold& p, const Matrix& X, const Matrix& Z) {
             return p.impl->project_tangent(X, p.impl->to_embedding(Z));
           })
      .def("riemannian_gradient",
           [](const PyManifold& p, const Matrix& X, const Matrix& g) {
             return p.impl->riemannian_gradient(X, g);
           })
      .def("riemannian_hessian",
           [](const PyManifold& p, const Matrix& X, const Matrix& egrad, const Matrix& ehess_xi,
              const Matrix& xi) { return p.impl->riemannian_hessian(X, egrad, ehess_xi, xi); })
      .def("retract",
           [](const PyManifold& p, const Matrix& X, const Matrix& xi, const std::string& kind) {
             return p.impl->retract(X, xi, retraction_kind(*p.impl, kind));
           },
           py::arg("x"), py::arg("xi"), py::arg("kind") = "default")
      .def("random_point",
           [](const PyManifold& p, Index n, std::uint64_t seed) {
             Rng rng(seed);
             return p.impl->random_point(rng, n);
           },
           py::arg("n"), py::arg("seed") = 0)
      .def("random_tangent",
           [](const PyManifold& p, const Matrix& X, std::uint64_t seed) {
             Rng rng(seed);
             return p.impl->random_tangent(rng, X);
           },
           py::arg("x"), py::arg("seed") = 0)
      .def("is_point", [](const PyManifold& p, const Matrix& X) { return p.impl->check_point(X).ok; })
      .def("is_tangent", [](const PyManifold& p, const Matrix& X, const Matrix& xi) {
        return p.impl->check_tangent(X, xi).ok;
      });

  py::class_<SolverResult>(m, "SolverResult")
      .def_readonly("x", &SolverResult::x)
      .def_readonly("status", &SolverResult::status)
      .def_readonly("iterations", &SolverResult::iterations)
      .def_readonly("cost", &SolverResult::cost)
      .def_readonly("grad_norm", &SolverResult::grad_norm)
      .def_readonly("cost_trace", &SolverResult::cost_trace)
      .def_readonly("grad_norm_trace", &SolverResult::grad_norm_trace)
      .def_readonly("step_trace", &SolverResult::step_trace)
      .def("__repr__", [](const SolverResult& r) {
        return "SolverResult(status=" + r.status + ", iterations=" + std::to_string(r.iterations) +
               ", cost=" + std::to_string(r.cost) + ")";
      });

  m.def("minimize",
        [](const PyManifold& M, py::function cost, py::function egrad, const Matrix& x0,
           const std::string& solver, py::object ehess, double tol, int max_iter,
           const std::string& retraction) {
          const Objective f = python_objective(cost, egrad, ehess);
          return to_result(run_solver(solver_kind(solver), *M.impl, f, x0,
                                      make_options(tol, max_iter, retraction)));
        },
        py::arg("manifold"), py::arg("cost"), py::arg("egrad"), py::arg("x0"),
        py::arg("solver") = "cg", py::arg("ehess") = py::none(), py::arg("tol") = 1e-6,
        py::arg("max_iter") = 1000, py::arg("retraction") = "auto");

  m.def("certify_gradient",
        [](const PyManifold& M, py::function cost, py::function egrad, const Matrix& X,
           std::uint64_t seed) {
          Rng rng(seed);
          const CertificationResult c =
              birkhoff::certify_gradient(*M.impl, python_objective(cost, egrad, py::none()), X, rng);
          return py::make_tuple(c.ok, c.max_rel_err);
        },
        py::arg("manifold"), py::arg("cost"), py::arg("egrad"), py::arg("x"), py::arg("seed") = 0);

  m.def("denoise",
        [](const Matrix& A, const std::string& manifold, const std::string& solver, double tol,
           int max_iter, std::uint64_t seed) {
          const auto M = make_manifold(manifold_kind(manifold));
          Rng rng(seed);
          const Matrix X0 = M->random_point(rng, A.rows());
          const Matrix target = manifold == "ds" ? A : symmetric_part(A);
          return to_result(run_solver(solver_kind(solver), *M, denoise_objective(target), X0,
                                      make_options(tol, max_iter, "auto")));
        },
        py::arg("a"), py::arg("manifold") = "ds", py::arg("solver") = "tr", py::arg("tol") = 1e-6,
        py::arg("max_iter") = 1000, py::arg("seed") = 0);

  m.def("convex_cluster",
        [](const Matrix& A, Index k, const std::string& formulation, double lambda, double rho,
           double mu, const std::string& solver, double tol, int max_iter) {
          ConvexClusterParams p;
          p.lambda = lambda;
          p.rho = rho;
          p.mu = mu;
          ManifoldKind kind = ManifoldKind::SymmetricStochastic;
          if (formulation == "sym") {
            p.formulation = ClusterFormulation::NuclearRegularizedSym;
          } else if (formulation == "ds") {
            p.formulation = ClusterFormulation::NuclearRegularizedDS;
            kind = ManifoldKind::DoublyStochastic;
          } else if (formulation == "psd") {
            p.formulation = ClusterFormulation::PSDConstrained;
            kind = ManifoldKind::DefiniteSymmetricStochastic;
          } else {
            throw py::value_error("unknown formulation '" + formulation + "'");
          }
          const auto M = make_manifold(kind);
          const Index n = A.rows();
          const SolverResult r =
              to_result(run_solver(solver_kind(solver), *M, convex_cluster_objective(A, p),
                                   Matrix::Constant(n, n, 1.0 / static_cast<double>(n)),
                                   make_options(tol, max_iter, "auto")));
          py::dict out;
          out["result"] = r;
          out["labels"] = extract_clusters(r.x, k);
          out["original_cost"] = convex_cluster_original_cost(A, r.x, lambda);
          return out;
        },
        py::arg("a"), py::arg("k"), py::arg("formulation") = "sym", py::arg("lambda_") = 0.5,
        py::arg("rho") = 1.0, py::arg("mu") = 1.0, py::arg("solver") = "cg", py::arg("tol") = 1e-6,
        py::arg("max_iter") = 1000);

  m.def("lowrank_cluster",
        [](const Matrix& A, Index k, const std::string& manifold, double alpha,
           const std::string& solver, const std::string& init, std::uint64_t seed, double tol,
           int max_iter) {
          const ManifoldKind kind = manifold_kind(manifold);
          if (kind == ManifoldKind::DoublyStochastic) {
            throw py::value_error("lowrank_cluster runs on sym or psd");
          }
          const auto M = make_manifold(kind);
          Matrix X0;
          if (init == "balanced") {
            X0 = balanced_start(A, kind);
          } else if (init == "random") {
            Rng rng(seed);
            X0 = M->random_point(rng, A.rows());
          } else {
            throw py::value_error("unknown init '" + init + "'");
          }
          SolverOptions o = make_options(tol, max_iter, "auto");
          o.certify_gradient = true;
          const SolverResult r =
              to_result(run_solver(solver_kind(solver), *M, lowrank_objective(A, {alpha}), X0, o));
          py::dict out;
          out["result"] = r;
          out["labels"] = extract_clusters(r.x, k, {.seed = seed});
          return out;
        },
        py::arg("a"), py::arg("k"), py::arg("manifold") = "sym", py::arg("alpha") = 1.05,
        py::arg("solver") = "cg", py::arg("init") = "balanced", py::arg("seed") = 0,
        py::arg("tol") = 1e-6, py::arg("max_iter") = 500);

  m.def("block_model",
        [](Index n, Index k, double p_in, double p_out, double sigma, std::uint64_t seed) {
          BlockModelSpec s;
          s.n = n;
          s.k = k;
          s.p_in = p_in;
          s.p_out = p_out;
          s.noise_sigma = sigma;
          s.seed = seed;
          const BlockModel bm = block_model_generate(s);
          return py::make_tuple(bm.A, bm.labels);
        },
        py::arg("n") = 30, py::arg("k") = 3, py::arg("p_in") = 0.7, py::arg("p_out") = 0.2,
        py::arg("sigma") = 0.2, py::arg("seed") = 0);

  m.def("sinkhorn_knopp",
        [](const Matrix& A, double tol, int max_iter) { return balance_tuple(birkhoff::sinkhorn_knopp(A, tol, max_iter)); },
        py::arg("a"), py::arg("tol") = kDefaultBalanceTol, py::arg("max_iter") = 0);
  m.def("dad_balance",
        [](const Matrix& A, double tol, int max_iter) { return balance_tuple(birkhoff::dad_balance(A, tol, max_iter)); },
        py::arg("a"), py::arg("tol") = kDefaultBalanceTol, py::arg("max_iter") = 0);
  m.def("dykstra_projection",
        [](const Matrix& A, double tol) { return dykstra_birkhoff_projection(A, tol).X; },
        py::arg("a"), py::arg("tol") = 1e-10);
  m.def("balanced_start",
        [](const Matrix& A, const std::string& manifold) {
          return birkhoff::balanced_start(A, manifold_kind(manifold));
        },
        py::arg("a"), py::arg("manifold") = "sym");
  m.def("extract_clusters",
        [](const Matrix& X, Index k, std::uint64_t seed) { return birkhoff::extract_clusters(X, k, {.seed = seed}); },
        py::arg("x"), py::arg("k"), py::arg("seed") = 0);
  m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("a"), py::arg("b"));
}
