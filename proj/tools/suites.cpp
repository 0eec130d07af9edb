#include "suites.hpp"

#include "config.hpp"
#include "matrix_io.hpp"

#include "birkhoff/definite.hpp"
#include "birkhoff/doubly_stochastic.hpp"
#include "birkhoff/symmetric.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace birkhoff::cli {

namespace {

constexpr double kRigidityT[] = {1e-2, 1e-3, 1e-4};

struct Thresholds {
  double value;
  bool at_least;
};

const std::map<std::string, Thresholds>& thresholds() {
  static const std::map<std::string, Thresholds> t = {
      {"metric", {0.0, false}},  // count of nonpositive norms
      {"tangency", {1e-8, false}},
      {"idempotence", {1e-10, false}},
      {"orthogonality", {1e-8, false}},
      {"centering", {1e-12, false}},
      {"rigidity", {0.9, true}},
      {"hessian-symmetry", {1e-8, false}},
      {"gradient-fd", {1e-5, false}},
      {"hessian-fd", {1e-4, false}},
      {"cross-projection", {1e-8, false}},
      {"pinv-perturbation", {1.8, true}},
  };
  return t;
}

bool applies(const std::string& suite, ManifoldKind kind) {
  if (suite == "cross-projection") return kind == ManifoldKind::SymmetricStochastic;
  if (suite == "pinv-perturbation") return kind == ManifoldKind::DoublyStochastic;
  return true;
}

// Test objectives with their exact derivatives. C lives in the embedding
// space of the manifold so Euclidean gradients stay in it. Values are kept
// small next to the directional derivatives so that rounding in the central
// difference stays far below the tolerance.
Objective test_objective(int which, const Matrix& C, const Matrix& X0) {
  Objective f;
  switch (which % 3) {
    case 0: {
      const Matrix A = X0 + 0.1 * C;
      f.value = [A](const Matrix& X) { return 0.5 * (X - A).squaredNorm(); };
      f.egrad = [A](const Matrix& X) -> Matrix { return X - A; };
      f.ehess = [](const Matrix&, const Matrix& xi) -> Matrix { return xi; };
      break;
    }
    case 1:
      // sum expm1(c x) - c x
      f.value = [C](const Matrix& X) {
        const Eigen::ArrayXXd cx = C.array() * X.array();
        return (cx.unaryExpr([](double v) { return std::expm1(v); }) - cx).sum();
      };
      f.egrad = [C](const Matrix& X) -> Matrix {
        const Eigen::ArrayXXd cx = C.array() * X.array();
        return (C.array() * cx.unaryExpr([](double v) { return std::expm1(v); })).matrix();
      };
      f.ehess = [C](const Matrix& X, const Matrix& xi) -> Matrix {
        return (C.array().square() * (C.array() * X.array()).exp() * xi.array()).matrix();
      };
      break;
    default:
      f.value = [C](const Matrix& X) { return (C.array() * X.array()).sum(); };
      f.egrad = [C](const Matrix&) -> Matrix { return C; };
      f.ehess = [](const Matrix& X, const Matrix&) -> Matrix {
        return Matrix::Zero(X.rows(), X.cols());
      };
  }
  return f;
}

// Scales xi so that |t xi| <= 0.05 X entrywise for |t| <= 1e-2, the largest
// step any suite takes, and on the definite manifold t ||xi||_2 stays below
// 0.05 lambda_min(X). Much smaller directions drown the slope tests in the
// balancing tolerance; larger ones leave the asymptotic regime.
Matrix interior_direction(const Manifold& M, const Matrix& X, const Matrix& xi) {
  double r = xi.cwiseQuotient(X).cwiseAbs().maxCoeff();
  if (M.kind() == ManifoldKind::DefiniteSymmetricStochastic) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(xi, Eigen::EigenvaluesOnly);
    r = std::max(r, es.eigenvalues().cwiseAbs().maxCoeff() / min_eigenvalue(X));
  }
  return r > 0.0 ? Matrix(xi * (5.0 / r)) : xi;
}

// Unit Frobenius direction for finite differences with step h, shrunk if
// needed so that X +- h xi stays inside the positive orthant.
Matrix fd_direction(const Matrix& X, const Matrix& xi, double h) {
  Matrix d = xi / xi.norm();
  const double r = h * d.cwiseQuotient(X).cwiseAbs().maxCoeff();
  if (r > 0.05) d *= 0.05 / r;
  return d;
}

double tangent_residual(const Manifold& M, const Matrix& xi) {
  double r = std::max((xi.rowwise().sum()).cwiseAbs().maxCoeff(),
                      (xi.colwise().sum()).cwiseAbs().maxCoeff());
  if (M.kind() != ManifoldKind::DoublyStochastic) r = std::max(r, asymmetry(xi));
  return r;
}

class Cell {
 public:
  Cell(const Manifold& M, Index n, Rng& rng) : M_(M), n_(n), rng_(rng) {}

  void draw() {
    X_ = M_.random_point(rng_, n_);
    Z_ = M_.to_embedding(gaussian_matrix(rng_, n_, n_));
    xi_ = M_.random_tangent(rng_, X_);
    eta_ = M_.random_tangent(rng_, X_);
  }

  double metric() const {
    return (M_.inner(X_, xi_, xi_) > 0.0 && M_.inner(X_, eta_, eta_) > 0.0) ? 0.0 : 1.0;
  }

  double tangency() const { return tangent_residual(M_, M_.project_tangent(X_, Z_)); }

  double idempotence() const {
    const Matrix P = M_.project_tangent(X_, Z_);
    return (M_.project_tangent(X_, P) - P).norm() / std::max(1.0, P.norm());
  }

  double orthogonality() const {
    const Matrix R = Z_ - M_.project_tangent(X_, Z_);
    const double scale = M_.norm(X_, R) * M_.norm(X_, xi_);
    return scale > 0.0 ? std::abs(M_.inner(X_, R, xi_)) / scale : 0.0;
  }

  double centering() const {
    double worst = 0.0;
    const Matrix zero = Matrix::Zero(n_, n_);
    for (RetractionKind k : M_.retractions())
      worst = std::max(worst, (M_.retract(X_, zero, k) - X_).norm());
    return worst;
  }

  // Smallest fitted slope over the retraction kinds. e(t) takes the worse of
  // +xi and -xi: the second and third order terms can cancel for one sign,
  // never for both. Errors at rounding level mean the retraction is exact to
  // first order along xi (canonical X + xi).
  double rigidity() const {
    const Matrix xi = interior_direction(M_, X_, xi_);
    double worst = std::numeric_limits<double>::infinity();
    for (RetractionKind k : M_.retractions()) {
      std::vector<double> ts, es;
      double emax = 0.0;
      for (double t : kRigidityT) {
        const double e = std::max(((M_.retract(X_, t * xi, k) - X_) / t - xi).norm(),
                                  ((M_.retract(X_, -t * xi, k) - X_) / -t - xi).norm());
        ts.push_back(t);
        es.push_back(e);
        emax = std::max(emax, e);
      }
      const double slope =
          emax <= 1e-9 * (1.0 + xi.norm()) ? std::numeric_limits<double>::infinity()
                                           : loglog_slope(ts, es);
      worst = std::min(worst, slope);
    }
    return worst;
  }

  double hessian_symmetry(int which) const {
    const Objective f = test_objective(which, Z_, X_);
    const HessianOperator H = M_.hessian_operator(X_, f.egrad(X_));
    const Matrix hx = H(xi_, f.ehess(X_, xi_));
    const Matrix he = H(eta_, f.ehess(X_, eta_));
    const double d = std::abs(M_.inner(X_, hx, eta_) - M_.inner(X_, xi_, he));
    return d / (1.0 + M_.norm(X_, xi_) * M_.norm(X_, eta_));
  }

  double gradient_fd(int which) const {
    const Objective f = test_objective(which, Z_, X_);
    const Matrix xi = fd_direction(X_, xi_, kDefaultFdStep);
    const double a = M_.inner(X_, M_.riemannian_gradient(X_, f.egrad(X_)), xi);
    const double b = fd_directional_derivative(f.value, X_, xi);
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
  }

  // hess[xi] against P_X(D grad[xi] - xi .* grad ./ (2X)), with D grad[xi] a
  // central difference of the Riemannian gradient along the affine line.
  double hessian_fd(int which) const {
    const Objective f = test_objective(which, Z_, X_);
    const double h = 1e-5;
    const Matrix xi = fd_direction(X_, xi_, h);
    const Matrix g = M_.riemannian_gradient(X_, f.egrad(X_));
    const Matrix hess = M_.hessian_operator(X_, f.egrad(X_))(xi, f.ehess(X_, xi));
    const Matrix Xp = X_ + h * xi, Xm = X_ - h * xi;
    const Matrix dg =
        (M_.riemannian_gradient(Xp, f.egrad(Xp)) - M_.riemannian_gradient(Xm, f.egrad(Xm))) /
        (2.0 * h);
    const Matrix oracle =
        M_.project_tangent(X_, dg - 0.5 * xi.cwiseProduct(g).cwiseQuotient(X_));
    const double scale = std::max(M_.norm(X_, hess), M_.norm(X_, oracle));
    return scale > 0.0 ? M_.norm(X_, hess - oracle) / scale : 0.0;
  }

  double cross_projection() const {
    return (ds_project_tangent(X_, Z_) - sym_project_tangent(X_, Z_)).norm();
  }

  double pinv_perturbation() const {
    const Matrix eps = ds_pinv_i_minus_xxt(X_).value;
    const Matrix xi = xi_ / xi_.norm();
    const Matrix edot = ds_epsilon_dot(eps, X_, xi);
    std::vector<double> ts, es;
    for (double t : kRigidityT) {
      ts.push_back(t);
      es.push_back((ds_pinv_i_minus_xxt(X_ + t * xi).value - (eps + t * edot)).norm());
    }
    return loglog_slope(ts, es);
  }

 private:
  const Manifold& M_;
  Index n_;
  Rng& rng_;
  Matrix X_, Z_, xi_, eta_;
};

}  // namespace

bool SuiteReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "metric",           "tangency",    "idempotence",      "orthogonality",
      "centering",        "rigidity",    "hessian-symmetry", "gradient-fd",
      "hessian-fd",       "cross-projection", "pinv-perturbation"};
  return names;
}

ManifoldKind parse_manifold(const std::string& name) {
  if (name == "ds") return ManifoldKind::DoublyStochastic;
  if (name == "sym") return ManifoldKind::SymmetricStochastic;
  if (name == "psd") return ManifoldKind::DefiniteSymmetricStochastic;
  throw UsageError("unknown manifold '" + name + "'");
}

std::string manifold_flag(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::DoublyStochastic: return "ds";
    case ManifoldKind::SymmetricStochastic: return "sym";
    case ManifoldKind::DefiniteSymmetricStochastic: return "psd";
  }
  return "?";
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& e) {
  const std::size_t m = t.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(t[i]);
    const double y = std::log(std::max(e[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dm = static_cast<double>(m);
  return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

SuiteReport run_suites(const SuiteOptions& opts) {
  const auto& names = suite_names();
  if (!opts.inject_breach.empty() && opts.inject_breach != "all" &&
      std::find(names.begin(), names.end(), opts.inject_breach) == names.end()) {
    throw UsageError("inject-breach: unknown suite '" + opts.inject_breach + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  for (const auto& mname : opts.manifolds) {
    const ManifoldKind kind = parse_manifold(mname);
    const auto M = make_manifold(kind);
    for (long long n : opts.n) {
      std::seed_seq sseq{static_cast<std::uint32_t>(opts.seed),
                         static_cast<std::uint32_t>(opts.seed >> 32),
                         static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(n)};
      Rng rng(sseq);
      Cell cell(*M, n, rng);
      std::map<std::string, double> worst;
      for (const auto& s : names) {
        if (applies(s, kind))
          worst[s] = thresholds().at(s).at_least ? std::numeric_limits<double>::infinity() : 0.0;
      }
      auto record = [&worst](const std::string& s, double v) {
        double& w = worst.at(s);
        w = thresholds().at(s).at_least ? std::min(w, v) : std::max(w, v);
        if (std::isnan(v)) w = v;
      };
      for (int d = 0; d < opts.draws; ++d) {
        cell.draw();
        record("metric", cell.metric());
        record("tangency", cell.tangency());
        record("idempotence", cell.idempotence());
        record("orthogonality", cell.orthogonality());
        record("centering", cell.centering());
        record("rigidity", cell.rigidity());
        record("hessian-symmetry", cell.hessian_symmetry(d));
        record("gradient-fd", cell.gradient_fd(d));
        record("hessian-fd", cell.hessian_fd(d));
        if (worst.count("cross-projection")) record("cross-projection", cell.cross_projection());
        if (worst.count("pinv-perturbation")) record("pinv-perturbation", cell.pinv_perturbation());
      }
      for (const auto& s : names) {
        if (!worst.count(s)) continue;
        SuiteRow row;
        row.suite = s;
        row.manifold = mname;
        row.n = n;
        row.value = worst.at(s);
        row.at_least = thresholds().at(s).at_least;
        row.threshold = thresholds().at(s).value;
        if (opts.inject_breach == s || opts.inject_breach == "all")
          row.threshold = row.at_least ? std::numeric_limits<double>::infinity() : -1.0;
        row.pass = row.at_least ? row.value >= row.threshold : row.value <= row.threshold;
        report.rows.push_back(row);
      }
    }
  }
  report.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string suite_report_csv(const SuiteReport& report) {
  std::string out = "suite,manifold,n,value,threshold,relation,pass\n";
  for (const auto& r : report.rows) {
    out += r.suite + "," + r.manifold + "," + std::to_string(r.n) + "," + format_double(r.value) +
           "," + format_double(r.threshold) + "," + (r.at_least ? ">=" : "<=") + "," +
           (r.pass ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace birkhoff::cli
