#pragma once

// Riemannian line-search descent, conjugate gradient, Newton and trust-region
// solvers, generic over the Manifold interface.

#include "birkhoff/manifold.hpp"

#include <optional>

namespace birkhoff {

enum class SolverStatus { Converged, MaxIter, LineSearchFailure, RetractionFailure };
std::string to_string(SolverStatus status);

enum class CgBetaRule { FletcherReeves, PolakRibierePlus, HestenesStiefel };
std::string to_string(CgBetaRule rule);

/// Which retraction a solver uses. Auto picks the manifold default, except
/// that on DP_n and SP_n the balanced retraction hands over to the canonical
/// one once alpha * ||xi||_X < auto_switch * min(X).
enum class RetractionChoice { Auto, Canonical, Balanced, ExpmAuto };
std::string to_string(RetractionChoice choice);

struct LineSearchOptions {
  double c1 = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 60;
  /// Strong-Wolfe search (bracketing and zoom) instead of plain
  /// backtracking; falls back to backtracking if no Armijo point is found.
  bool wolfe = false;
  double c2 = 0.1;
  int max_expansions = 10;
  /// The Wolfe search does not expand past a Fisher step length of this;
  /// 0 selects sqrt(n).
  double max_step_norm = 0.0;
};

struct CgOptions {
  CgBetaRule rule = CgBetaRule::PolakRibierePlus;
  /// Reset to -grad every `restart_period` iterations; 0 means the manifold
  /// dimension.
  int restart_period = 0;
  /// CG uses the strong-Wolfe search regardless of LineSearchOptions::wolfe.
  bool strong_wolfe = true;
};

struct NewtonOptions {
  /// 0 means the manifold dimension.
  int max_inner = 0;
  double forcing_cap = 0.5;
};

struct TrustRegionOptions {
  /// 0 selects max_radius / 8.
  double initial_radius = 0.0;
  /// 0 selects sqrt(n), the Fisher norm bound of a canonical step.
  double max_radius = 0.0;
  double accept_ratio = 0.1;
  double shrink_ratio = 0.25;
  double expand_ratio = 0.75;
  int max_inner = 0;
  double kappa = 0.1;
  double theta = 1.0;
};

/// One row of a solver trace.
struct TraceRecord {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double elapsed_s = 0.0;
  int inner_iterations = 0;
  bool accepted = true;
  bool fallback = false;  // Newton fell back to -grad; TR hit negative curvature
  double radius = 0.0;    // trust region only
};

using IterateCallback = std::function<void(const TraceRecord&, const Matrix& X)>;

struct SolverOptions {
  double grad_tol = 1e-6;
  int max_iter = 1000;
  LineSearchOptions ls;
  CgOptions cg;
  NewtonOptions newton;
  TrustRegionOptions tr;
  RetractionChoice retraction = RetractionChoice::Auto;
  double auto_switch = 0.1;
  /// false writes zero elapsed times so traces are reproducible byte for byte.
  bool timing = true;
  /// Called for every trace row with the iterate it describes.
  IterateCallback callback;
  /// Verify the Euclidean gradient against finite differences before the
  /// first iteration; throws PreconditionError on failure.
  bool certify_gradient = false;
  double certify_rel_tol = 1e-5;

  /// Throws DomainError unless 0 < c1 < c2 < 1 and tolerances are positive.
  void validate() const;
};

struct SolverReport {
  ManifoldPoint final_point;
  std::vector<TraceRecord> trace;
  SolverStatus status = SolverStatus::MaxIter;
  int iterations = 0;
  double final_cost = 0.0;
  double final_grad_norm = 0.0;
  int fallbacks = 0;
  std::string message;
};

/// Backtracking exhausted its budget.
class LineSearchError : public Error {
 public:
  LineSearchError(const std::string& what, bool retraction_only)
      : Error(what), retraction_only_(retraction_only) {}
  /// Every trial failed inside the retraction.
  bool retraction_only() const { return retraction_only_; }

 private:
  bool retraction_only_;
};

struct LineSearchResult {
  double step = 0.0;
  Matrix point;
  double cost = 0.0;
  int backtracks = 0;
  int retraction_rejections = 0;
};

/// Retracts X + alpha xi with the kind chosen by `choice`.
Matrix solver_retract(const Manifold& M, const Matrix& X, const Matrix& xi, double alpha,
                      const SolverOptions& opts);

/// Armijo backtracking from `initial_step` along a descent direction.
LineSearchResult armijo_linesearch(const Manifold& M, const Matrix& X, const Objective& f,
                                   const Matrix& direction, const Matrix& grad, double fX,
                                   double initial_step, const SolverOptions& opts);

/// beta for the given rule; g_prev and d_prev already transported to the
/// tangent space at X.
double cg_beta(CgBetaRule rule, const Matrix& X, const Matrix& g, const Matrix& X_prev,
               const Matrix& g_prev, const Matrix& g_prev_transported,
               const Matrix& d_prev_transported);

struct NewtonSystemResult {
  Matrix xi;
  int iterations = 0;
  double residual = 0.0;  // ||hess[xi] + grad||_X
  bool negative_curvature = false;
  bool stalled = false;
};

/// Truncated CG in the Fisher metric for hess[xi] = -grad.
NewtonSystemResult solve_newton_system(const Manifold& M, const Matrix& X,
                                       const HessianOperator& hess,
                                       const std::function<Matrix(const Matrix&)>& ehess_at_X,
                                       const Matrix& grad, double tol, int max_inner);

struct CertificationResult {
  bool ok = true;
  double max_rel_err = 0.0;
};

/// Compares <grad f, xi>_X with central differences along random tangents.
CertificationResult certify_gradient(const Manifold& M, const Objective& f, const Matrix& X,
                                     Rng& rng, int trials = 5, double rel_tol = 1e-5);

SolverReport gradient_descent(const Manifold& M, const Objective& f, const Matrix& X0,
                              const SolverOptions& opts = {});
SolverReport conjugate_gradient(const Manifold& M, const Objective& f, const Matrix& X0,
                                const SolverOptions& opts = {});
SolverReport newton(const Manifold& M, const Objective& f, const Matrix& X0,
                    const SolverOptions& opts = {});
SolverReport trust_region(const Manifold& M, const Objective& f, const Matrix& X0,
                          const SolverOptions& opts = {});

enum class SolverKind { GradientDescent, ConjugateGradient, Newton, TrustRegion };
std::string to_string(SolverKind kind);
SolverReport run_solver(SolverKind kind, const Manifold& M, const Objective& f,
                        const Matrix& X0, const SolverOptions& opts = {});

}  // namespace birkhoff
