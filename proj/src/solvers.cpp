#include "birkhoff/solvers.hpp"

#include "birkhoff/balancing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace birkhoff {

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged:
      return "converged";
    case SolverStatus::MaxIter:
      return "max_iter";
    case SolverStatus::LineSearchFailure:
      return "line_search_failure";
    case SolverStatus::RetractionFailure:
      return "retraction_failure";
  }
  return "unknown";
}

std::string to_string(CgBetaRule rule) {
  switch (rule) {
    case CgBetaRule::FletcherReeves:
      return "fr";
    case CgBetaRule::PolakRibierePlus:
      return "pr+";
    case CgBetaRule::HestenesStiefel:
      return "hs";
  }
  return "unknown";
}

std::string to_string(RetractionChoice choice) {
  switch (choice) {
    case RetractionChoice::Auto:
      return "auto";
    case RetractionChoice::Canonical:
      return "canonical";
    case RetractionChoice::Balanced:
      return "balanced";
    case RetractionChoice::ExpmAuto:
      return "expm";
  }
  return "unknown";
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::GradientDescent:
      return "gd";
    case SolverKind::ConjugateGradient:
      return "cg";
    case SolverKind::Newton:
      return "newton";
    case SolverKind::TrustRegion:
      return "tr";
  }
  return "unknown";
}

void SolverOptions::validate() const {
  if (!(ls.c1 > 0.0 && ls.c1 < 1.0)) throw DomainError("solver options: need 0 < c1 < 1");
  if (!(ls.c2 > ls.c1 && ls.c2 < 1.0)) throw DomainError("solver options: need c1 < c2 < 1");
  if (!(ls.backtrack > 0.0 && ls.backtrack < 1.0)) {
    throw DomainError("solver options: need 0 < backtrack factor < 1");
  }
  if (!(ls.initial_step > 0.0)) throw DomainError("solver options: initial step must be > 0");
  if (!(grad_tol > 0.0)) throw DomainError("solver options: grad_tol must be > 0");
  if (max_iter < 0) throw DomainError("solver options: max_iter must be >= 0");
  if (!(tr.accept_ratio >= 0.0 && tr.accept_ratio < tr.shrink_ratio &&
        tr.shrink_ratio < tr.expand_ratio && tr.expand_ratio < 1.0)) {
    throw DomainError("solver options: need 0 <= accept < shrink < expand < 1");
  }
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Round-off allowance when comparing two cost values.
double cost_slack(double f) { return 256.0 * kEps * std::max(1.0, std::abs(f)); }

class Clock {
 public:
  explicit Clock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double elapsed() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

RetractionKind resolve_kind(const Manifold& M, const Matrix& X, const Matrix& xi, double alpha,
                            const SolverOptions& opts) {
  switch (opts.retraction) {
    case RetractionChoice::Canonical:
      return RetractionKind::Canonical;
    case RetractionChoice::Balanced:
      return RetractionKind::Balanced;
    case RetractionChoice::ExpmAuto:
      return RetractionKind::ExpmAuto;
    case RetractionChoice::Auto:
      break;
  }
  const RetractionKind kind = M.default_retraction();
  if (kind == RetractionKind::Balanced &&
      std::abs(alpha) * M.norm(X, xi) < opts.auto_switch * X.minCoeff()) {
    return RetractionKind::Canonical;
  }
  return kind;
}

// Vector transport from X to Y by relative change, xi -> P_Y(xi . Y / X).
// This is the velocity of t -> X . exp(t xi / X) before balancing. Plain
// projection keeps absolute entries instead, so after a step that shrank some
// entries by orders of magnitude the transported direction shrinks them again.
Matrix transport(const Manifold& M, const Matrix& X, const Matrix& Y, const Matrix& xi) {
  return M.project_tangent(Y, M.to_embedding(xi.cwiseProduct(Y.cwiseQuotient(X))));
}

struct State {
  Matrix X;
  double cost = 0.0;
  Matrix egrad;
  Matrix grad;
  double grad_norm = 0.0;
};

State evaluate(const Manifold& M, const Objective& f, Matrix X) {
  State s;
  s.cost = f.value(X);
  s.egrad = f.egrad(X);
  s.grad = M.riemannian_gradient(X, s.egrad);
  s.grad_norm = M.norm(X, s.grad);
  s.X = std::move(X);
  return s;
}

class Recorder {
 public:
  Recorder(SolverReport& report, const SolverOptions& opts)
      : report_(report), opts_(opts), clock_(opts.timing) {}

  void record(TraceRecord rec, const State& s) {
    rec.cost = s.cost;
    rec.grad_norm = s.grad_norm;
    rec.elapsed_s = clock_.elapsed();
    report_.trace.push_back(rec);
    if (opts_.callback) opts_.callback(rec, s.X);
  }

 private:
  SolverReport& report_;
  const SolverOptions& opts_;
  Clock clock_;
};

void finish(SolverReport& report, State& s, ManifoldKind kind, int iterations) {
  report.iterations = iterations;
  report.final_cost = s.cost;
  report.final_grad_norm = s.grad_norm;
  report.final_point = ManifoldPoint{std::move(s.X), kind};
}

void check_start(const Manifold& M, const Objective& f, const Matrix& X0,
                 const SolverOptions& opts) {
  opts.validate();
  if (!f.value || !f.egrad) throw PreconditionError("solver: objective needs value and egrad");
  if (opts.retraction != RetractionChoice::Auto) {
    const RetractionKind want = resolve_kind(M, X0, X0, 0.0, opts);
    const std::vector<RetractionKind> have = M.retractions();
    if (std::find(have.begin(), have.end(), want) == have.end()) {
      throw PreconditionError("solver: retraction " + to_string(opts.retraction) + " is not available on " +
                              M.name());
    }
  }
  const CheckResult chk = M.check_point(X0);
  if (!chk.ok) throw DomainError("solver: initial point is not on the manifold (" + chk.reason + ")");
  if (opts.certify_gradient) {
    Rng rng(0x5eed);
    const CertificationResult c = certify_gradient(M, f, X0, rng, 5, opts.certify_rel_tol);
    if (!c.ok) {
      std::ostringstream os;
      os << "solver: gradient certification failed (max relative error " << c.max_rel_err
         << ")";
      throw PreconditionError(os.str());
    }
  }
}

enum class DirectionRule { Steepest, Conjugate, Newton };

SolverReport line_search_solver(const Manifold& M, const Objective& f, const Matrix& X0,
                                const SolverOptions& opts, DirectionRule rule) {
  check_start(M, f, X0, opts);
  if (rule == DirectionRule::Newton && !f.has_hessian()) {
    throw PreconditionError("newton: objective provides no Euclidean Hessian");
  }
  SolverReport report;
  Recorder rec(report, opts);
  State s = evaluate(M, f, X0);
  rec.record(TraceRecord{}, s);

  const Index n = X0.rows();
  const int restart = rule == DirectionRule::Conjugate
                          ? (opts.cg.restart_period > 0 ? opts.cg.restart_period
                                                        : static_cast<int>(std::max<Index>(
                                                              1, M.dimension(n))))
                          : 1;
  const int max_inner = opts.newton.max_inner > 0
                            ? opts.newton.max_inner
                            : static_cast<int>(std::max<Index>(1, M.dimension(n)));

  SolverOptions ls_opts = opts;
  if (rule == DirectionRule::Conjugate && opts.cg.strong_wolfe) ls_opts.ls.wolfe = true;

  Matrix X_prev, g_prev, d_prev;
  double f_prev = 0.0, alpha_prev = opts.ls.initial_step;
  int since_restart = 0;
  int k = 0;
  report.status = SolverStatus::MaxIter;
  if (s.grad_norm < opts.grad_tol) report.status = SolverStatus::Converged;

  while (report.status != SolverStatus::Converged && k < opts.max_iter) {
    TraceRecord tr;
    Matrix d;
    bool newton_step = false;
    if (rule == DirectionRule::Conjugate && k > 0 && since_restart < restart) {
      const Matrix Td = transport(M, X_prev, s.X, d_prev);
      const Matrix Tg = transport(M, X_prev, s.X, g_prev);
      const double beta = cg_beta(opts.cg.rule, s.X, s.grad, X_prev, g_prev, Tg, Td);
      d = -s.grad + beta * Td;
      if (!(M.inner(s.X, s.grad, d) < 0.0)) {
        d = -s.grad;
        tr.fallback = true;
        since_restart = 0;
      }
    } else if (rule == DirectionRule::Newton && f.hessian_available(s.X)) {
      const HessianOperator H = M.hessian_operator(s.X, s.egrad);
      const Matrix& Xc = s.X;
      const double tol = std::min(opts.newton.forcing_cap, std::sqrt(s.grad_norm)) * s.grad_norm;
      const NewtonSystemResult ns = solve_newton_system(
          M, s.X, H, [&f, &Xc](const Matrix& xi) { return f.ehess(Xc, xi); }, s.grad, tol,
          max_inner);
      tr.inner_iterations = ns.iterations;
      d = ns.xi;
      if ((ns.negative_curvature && ns.iterations == 0) || !d.allFinite() ||
          !(M.inner(s.X, s.grad, d) < 0.0)) {
        d = -s.grad;
        tr.fallback = true;
      } else {
        newton_step = true;
      }
    } else {
      d = -s.grad;
      if (rule == DirectionRule::Newton) tr.fallback = true;
      since_restart = 0;
    }
    if (tr.fallback) ++report.fallbacks;

    double alpha0 = opts.ls.initial_step;
    if (newton_step) {
      alpha0 = 1.0;
    } else if (k > 0) {
      const double slope = M.inner(s.X, s.grad, d);
      const double guess = 2.0 * (f_prev - s.cost) / (-slope);
      alpha0 = (std::isfinite(guess) && guess > 0.0) ? guess : 2.0 * alpha_prev;
    }

    LineSearchResult ls;
    try {
      ls = armijo_linesearch(M, s.X, f, d, s.grad, s.cost, alpha0, ls_opts);
    } catch (const LineSearchError& e) {
      report.status = e.retraction_only() ? SolverStatus::RetractionFailure
                                          : SolverStatus::LineSearchFailure;
      report.message = e.what();
      break;
    }
    ++k;
    ++since_restart;
    tr.iter = k;
    tr.step = ls.step * M.norm(s.X, d);
    X_prev = std::move(s.X);
    g_prev = std::move(s.grad);
    d_prev = d;
    f_prev = s.cost;
    alpha_prev = ls.step;
    s = evaluate(M, f, std::move(ls.point));
    rec.record(tr, s);
    if (s.grad_norm < opts.grad_tol) report.status = SolverStatus::Converged;
  }
  finish(report, s, M.kind(), k);
  return report;
}

struct TcgResult {
  Matrix eta, Heta;
  int iterations = 0;
  bool boundary = false;
  bool negative_curvature = false;
};

// Steihaug-Toint truncated CG for min <g, eta> + 1/2 <eta, H eta> in the
// Fisher metric subject to ||eta||_X <= radius.
TcgResult truncated_cg(const Manifold& M, const Matrix& X, const std::function<Matrix(const Matrix&)>& hvp,
                       const Matrix& g, double radius, const TrustRegionOptions& o, int max_inner) {
  TcgResult out;
  out.eta = Matrix::Zero(X.rows(), X.cols());
  out.Heta = out.eta;
  Matrix r = g;
  Matrix d = -r;
  double rr = M.inner(X, r, r);
  const double r0 = std::sqrt(rr);
  const double stop = r0 * std::min(std::pow(r0, o.theta), o.kappa);
  for (int j = 0; j < max_inner; ++j) {
    const Matrix Hd = hvp(d);
    const double dHd = M.inner(X, d, Hd);
    const double alpha = rr / dHd;
    const Matrix trial = out.eta + alpha * d;
    if (!(dHd > 0.0) || M.inner(X, trial, trial) >= radius * radius) {
      const double ed = M.inner(X, out.eta, d);
      const double dd = M.inner(X, d, d);
      const double ee = M.inner(X, out.eta, out.eta);
      const double tau = (-ed + std::sqrt(std::max(0.0, ed * ed + dd * (radius * radius - ee)))) / dd;
      out.eta = M.project_tangent(X, M.to_embedding(out.eta + tau * d));
      out.Heta += tau * Hd;
      out.boundary = true;
      out.negative_curvature = !(dHd > 0.0);
      out.iterations = j + 1;
      return out;
    }
    out.eta = trial;
    out.Heta += alpha * Hd;
    // Re-project so rounding drift off the tangent space does not build up
    // over long inner runs.
    r = M.project_tangent(X, M.to_embedding(r + alpha * Hd));
    const double rr_new = M.inner(X, r, r);
    out.iterations = j + 1;
    if (std::sqrt(rr_new) <= stop) break;
    d = -r + (rr_new / rr) * d;
    rr = rr_new;
  }
  out.eta = M.project_tangent(X, M.to_embedding(out.eta));
  return out;
}

}  // namespace

Matrix solver_retract(const Manifold& M, const Matrix& X, const Matrix& xi, double alpha,
                      const SolverOptions& opts) {
  const RetractionKind kind = resolve_kind(M, X, xi, alpha, opts);
  return M.retract(X, alpha * xi, kind);
}

namespace {

struct Trial {
  bool ok = false;
  Matrix point;
  double cost = 0.0;
};

// Strong-Wolfe search by bracketing and zoom with safeguarded quadratic
// interpolation. phi'(a) is <grad f(Y), P_Y(d)>_Y at Y = R_X(a d). Returns an
// empty optional when no Armijo point turns up, so the caller can fall back to
// plain backtracking.
std::optional<LineSearchResult> wolfe_search(const Manifold& M, const Objective& f,
                                             const Matrix& X, const Matrix& direction, double fX, double slope,
                                             double initial_step, const LineSearchOptions& o,
                                             double slack, double max_alpha,
                                             const std::function<Trial(double)>& trial) {
  auto dphi = [&](const Matrix& Y) {
    const Matrix g = M.riemannian_gradient(Y, f.egrad(Y));
    return M.inner(Y, g, transport(M, X, Y, direction));
  };
  auto armijo = [&](double a, double fa) {
    return fa <= fX && fa <= fX + o.c1 * a * slope + slack;
  };
  auto wolfe = [&](double d) { return std::abs(d) <= o.c2 * std::abs(slope); };

  std::optional<LineSearchResult> best;
  auto keep = [&](double a, Trial& t) {
    if (!best || t.cost < best->cost) {
      best = LineSearchResult{a, t.point, t.cost, 0, 0};
    }
  };

  double lo = 0.0, f_lo = fX, d_lo = slope;
  double hi = 0.0, f_hi = 0.0;
  bool bracketed = false;
  double a = initial_step;
  int expansions = 0;
  for (int i = 0; i < o.max_expansions + 30; ++i) {
    if (bracketed) {
      // Minimizer of the quadratic through (lo, f_lo, d_lo) and (hi, f_hi),
      // kept inside the middle 80% of the bracket.
      const double w = hi - lo;
      const double den = 2.0 * (f_hi - f_lo - d_lo * w);
      double t = den > 0.0 ? -d_lo * w * w / den : 0.5 * w;
      const double lo_lim = std::min(0.1 * w, 0.9 * w), hi_lim = std::max(0.1 * w, 0.9 * w);
      if (!std::isfinite(t) || t < lo_lim || t > hi_lim) t = 0.5 * w;
      a = lo + t;
    }
    Trial t = trial(a);
    if (!t.ok || !armijo(a, t.cost) || t.cost >= f_lo) {
      hi = a;
      f_hi = t.ok ? t.cost : std::numeric_limits<double>::infinity();
      if (!std::isfinite(f_hi)) f_hi = f_lo + std::abs(d_lo) * std::abs(a - lo) * 10.0;
      bracketed = true;
      continue;
    }
    keep(a, t);
    const double d = dphi(t.point);
    if (wolfe(d)) return best;
    if (bracketed ? d * (hi - lo) >= 0.0 : d >= 0.0) {
      hi = lo;
      f_hi = f_lo;
      bracketed = true;
    }
    lo = a;
    f_lo = t.cost;
    d_lo = d;
    if (!bracketed) {
      // Expanding far along a saturating retraction only crushes entries
      // towards zero, so growth stops at the step-length cap.
      if (++expansions > o.max_expansions || 2.0 * a > max_alpha) break;
      a = 2.0 * a;
    }
    if (bracketed && std::abs(hi - lo) <= 1e-4 * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return best;
}

}  // namespace

LineSearchResult armijo_linesearch(const Manifold& M, const Matrix& X, const Objective& f,
                                   const Matrix& direction, const Matrix& grad, double fX,
                                   double initial_step, const SolverOptions& opts) {
  const LineSearchOptions& o = opts.ls;
  const double slope = M.inner(X, grad, direction);
  if (!(slope < 0.0)) {
    throw PreconditionError("armijo_linesearch: direction is not a descent direction");
  }
  const double slack = cost_slack(fX);
  int rejections = 0;
  auto trial = [&](double alpha) {
    Trial t;
    try {
      t.point = solver_retract(M, X, direction, alpha, opts);
      t.cost = f.value(t.point);
      t.ok = std::isfinite(t.cost);
    } catch (const StepTooLargeError&) {
    } catch (const RetractionFailure&) {
    } catch (const BalanceNonConvergence&) {
    } catch (const NumericalError&) {
    } catch (const DomainError&) {
    }
    if (!t.ok) ++rejections;
    return t;
  };

  if (o.wolfe) {
    const double cap = o.max_step_norm > 0.0 ? o.max_step_norm
                                             : std::sqrt(static_cast<double>(X.rows()));
    const double max_alpha = cap / M.norm(X, direction);
    if (auto w = wolfe_search(M, f, X, direction, fX, slope, initial_step, o, slack, max_alpha,
                              trial)) {
      w->retraction_rejections = rejections;
      return *w;
    }
  }

  LineSearchResult out;
  double alpha = initial_step;
  int attempts = 0;
  rejections = 0;
  for (int b = 0; b <= o.max_backtracks; ++b, alpha *= o.backtrack) {
    ++attempts;
    Trial t = trial(alpha);
    // The slack absorbs rounding in the sufficient-decrease test, but the
    // cost itself must never go up.
    if (!t.ok || t.cost > fX || t.cost > fX + o.c1 * alpha * slope + slack) continue;
    out.step = alpha;
    out.point = std::move(t.point);
    out.cost = t.cost;
    out.backtracks = b;
    out.retraction_rejections = rejections;
    return out;
  }
  std::ostringstream os;
  os << "armijo_linesearch: no acceptable step after " << attempts << " trials";
  throw LineSearchError(os.str(), rejections == attempts);
}

double cg_beta(CgBetaRule rule, const Matrix& X, const Matrix& g, const Matrix& X_prev,
               const Matrix& g_prev, const Matrix& g_prev_transported,
               const Matrix& d_prev_transported) {
  const double gg_prev = fisher_inner(X_prev, g_prev, g_prev);
  if (!(gg_prev > 0.0)) return 0.0;
  switch (rule) {
    case CgBetaRule::FletcherReeves:
      return fisher_inner(X, g, g) / gg_prev;
    case CgBetaRule::PolakRibierePlus: {
      const Matrix y = g - g_prev_transported;
      return std::max(0.0, fisher_inner(X, g, y) / gg_prev);
    }
    case CgBetaRule::HestenesStiefel: {
      const Matrix y = g - g_prev_transported;
      const double den = fisher_inner(X, d_prev_transported, y);
      if (den == 0.0) return 0.0;
      return std::max(0.0, fisher_inner(X, g, y) / den);
    }
  }
  return 0.0;
}

NewtonSystemResult solve_newton_system(const Manifold& M, const Matrix& X,
                                       const HessianOperator& hess,
                                       const std::function<Matrix(const Matrix&)>& ehess_at_X,
                                       const Matrix& grad, double tol, int max_inner) {
  NewtonSystemResult out;
  out.xi = Matrix::Zero(X.rows(), X.cols());
  Matrix r = -grad;
  Matrix p = r;
  double rr = M.inner(X, r, r);
  int j = 0;
  for (; j < max_inner; ++j) {
    if (std::sqrt(rr) <= tol) break;
    const Matrix Hp = hess(p, ehess_at_X(p));
    const double pHp = M.inner(X, p, Hp);
    if (!(pHp > 0.0)) {
      out.negative_curvature = true;
      break;
    }
    const double a = rr / pHp;
    out.xi += a * p;
    r = M.project_tangent(X, M.to_embedding(r - a * Hp));
    const double rr_new = M.inner(X, r, r);
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  out.xi = M.project_tangent(X, M.to_embedding(out.xi));
  out.iterations = j;
  out.residual = std::sqrt(rr);
  out.stalled = !out.negative_curvature && out.residual > tol;
  return out;
}

CertificationResult certify_gradient(const Manifold& M, const Objective& f, const Matrix& X,
                                     Rng& rng, int trials, double rel_tol) {
  CertificationResult out;
  const Matrix g = M.riemannian_gradient(X, f.egrad(X));
  for (int t = 0; t < trials; ++t) {
    Matrix xi = M.random_tangent(rng, X);
    const double nx = M.norm(X, xi);
    if (nx > 0.0) xi /= nx;
    // Keep X +- h xi well inside the orthant. Richardson extrapolation of two
    // central differences lets h be large enough that cancellation in f
    // stays far below the tolerance.
    const double ratio = xi.cwiseQuotient(X).cwiseAbs().maxCoeff();
    double h = 1e-3;
    if (ratio * h > 0.1) h = 0.1 / ratio;
    const double d1 = fd_directional_derivative(f.value, X, xi, h);
    const double d2 = fd_directional_derivative(f.value, X, xi, 0.5 * h);
    const double fd = (4.0 * d2 - d1) / 3.0;
    const double an = M.inner(X, g, xi);
    const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-10});
    out.max_rel_err = std::max(out.max_rel_err, rel);
  }
  out.ok = out.max_rel_err <= rel_tol;
  return out;
}

SolverReport gradient_descent(const Manifold& M, const Objective& f, const Matrix& X0,
                              const SolverOptions& opts) {
  return line_search_solver(M, f, X0, opts, DirectionRule::Steepest);
}

SolverReport conjugate_gradient(const Manifold& M, const Objective& f, const Matrix& X0,
                                const SolverOptions& opts) {
  return line_search_solver(M, f, X0, opts, DirectionRule::Conjugate);
}

SolverReport newton(const Manifold& M, const Objective& f, const Matrix& X0,
                    const SolverOptions& opts) {
  return line_search_solver(M, f, X0, opts, DirectionRule::Newton);
}

SolverReport trust_region(const Manifold& M, const Objective& f, const Matrix& X0,
                          const SolverOptions& opts) {
  check_start(M, f, X0, opts);
  if (!f.has_hessian()) throw PreconditionError("trust_region: objective provides no Euclidean Hessian");
  const TrustRegionOptions& o = opts.tr;
  const Index n = X0.rows();
  const double max_radius = o.max_radius > 0.0 ? o.max_radius : std::sqrt(static_cast<double>(n));
  double radius = o.initial_radius > 0.0 ? o.initial_radius : max_radius / 8.0;
  const int max_inner =
      o.max_inner > 0 ? o.max_inner : static_cast<int>(std::max<Index>(1, M.dimension(n)));

  SolverReport report;
  Recorder rec(report, opts);
  State s = evaluate(M, f, X0);
  {
    TraceRecord first;
    first.radius = radius;
    rec.record(first, s);
  }
  report.status = s.grad_norm < opts.grad_tol ? SolverStatus::Converged : SolverStatus::MaxIter;
  int k = 0;
  while (report.status != SolverStatus::Converged && k < opts.max_iter) {
    TraceRecord tr;
    TcgResult t;
    if (f.hessian_available(s.X)) {
      const HessianOperator H = M.hessian_operator(s.X, s.egrad);
      const Matrix& Xc = s.X;
      t = truncated_cg(
          M, s.X, [&](const Matrix& xi) { return H(xi, f.ehess(Xc, xi)); }, s.grad, radius, o,
          max_inner);
    } else {
      // Cauchy step for a zero model Hessian.
      t.eta = -(radius / s.grad_norm) * s.grad;
      t.Heta = Matrix::Zero(n, n);
      t.boundary = true;
      tr.fallback = true;
      ++report.fallbacks;
    }
    if (t.negative_curvature) {
      tr.fallback = true;
      ++report.fallbacks;
    }
    const double model_decrease =
        -(M.inner(s.X, s.grad, t.eta) + 0.5 * M.inner(s.X, t.eta, t.Heta));

    bool retraction_failed = false;
    Matrix Y;
    double fy = 0.0;
    try {
      Y = solver_retract(M, s.X, t.eta, 1.0, opts);
      fy = f.value(Y);
      if (!std::isfinite(fy)) retraction_failed = true;
    } catch (const StepTooLargeError&) {
      retraction_failed = true;
    } catch (const RetractionFailure&) {
      retraction_failed = true;
    } catch (const BalanceNonConvergence&) {
      retraction_failed = true;
    } catch (const DomainError&) {
      retraction_failed = true;
    }
    double rho = -std::numeric_limits<double>::infinity();
    if (!retraction_failed) {
      const double reg = 1e3 * kEps * std::max(1.0, std::abs(s.cost));
      rho = (s.cost - fy + reg) / (model_decrease + reg);
    }
    const bool accepted = !retraction_failed && model_decrease > 0.0 && rho > o.accept_ratio;
    const double step_norm = M.norm(s.X, t.eta);
    if (rho < o.shrink_ratio) {
      radius = 0.25 * std::min(radius, step_norm > 0.0 ? step_norm : radius);
    } else if (rho > o.expand_ratio && t.boundary) {
      radius = std::min(2.0 * radius, max_radius);
    }
    ++k;
    tr.iter = k;
    tr.inner_iterations = t.iterations;
    tr.accepted = accepted;
    tr.radius = radius;
    if (accepted) {
      tr.step = step_norm;
      s = evaluate(M, f, std::move(Y));
    }
    rec.record(tr, s);
    if (s.grad_norm < opts.grad_tol) {
      report.status = SolverStatus::Converged;
    } else if (radius < 1e-14 * max_radius) {
      report.status = retraction_failed ? SolverStatus::RetractionFailure
                                        : SolverStatus::LineSearchFailure;
      report.message = "trust_region: radius collapsed";
      break;
    }
  }
  finish(report, s, M.kind(), k);
  return report;
}

SolverReport run_solver(SolverKind kind, const Manifold& M, const Objective& f,
                        const Matrix& X0, const SolverOptions& opts) {
  switch (kind) {
    case SolverKind::GradientDescent:
      return gradient_descent(M, f, X0, opts);
    case SolverKind::ConjugateGradient:
      return conjugate_gradient(M, f, X0, opts);
    case SolverKind::Newton:
      return newton(M, f, X0, opts);
    case SolverKind::TrustRegion:
      return trust_region(M, f, X0, opts);
  }
  throw DomainError("run_solver: unknown solver");
}

}  // namespace birkhoff
