#include "birkhoff/problems.hpp"

#include "birkhoff/balancing.hpp"
#include "birkhoff/definite.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace birkhoff {

std::string to_string(ClusterFormulation f) {
  switch (f) {
    case ClusterFormulation::PSDConstrained:
      return "psd";
    case ClusterFormulation::NuclearRegularizedSym:
      return "sym";
    case ClusterFormulation::NuclearRegularizedDS:
      return "ds";
  }
  return "unknown";
}

Objective denoise_objective(const Matrix& A) {
  require_square(A, "denoise_objective");
  require_finite(A, "denoise_objective");
  Objective f;
  f.value = [A](const Matrix& X) { return (A - X).squaredNorm(); };
  f.egrad = [A](const Matrix& X) -> Matrix { return 2.0 * (X - A); };
  f.ehess = [](const Matrix&, const Matrix& xi) -> Matrix { return 2.0 * xi; };
  return f;
}

DenoiseInstance make_denoise_instance(const Manifold& M, Index n, std::uint64_t seed,
                                      double noise_level) {
  if (n < 2) throw DomainError("make_denoise_instance: need n >= 2");
  if (!(noise_level >= 0.0 && noise_level < 1.0)) {
    throw DomainError("make_denoise_instance: noise level must lie in [0, 1)");
  }
  Rng rng(seed);
  const double nn = static_cast<double>(n);
  DenoiseInstance out;
  out.truth = 0.5 * M.random_point(rng, n) + Matrix::Constant(n, n, 0.5 / nn);
  const Matrix N = M.to_embedding(gaussian_matrix(rng, n, n));
  // Zero-sum part of N: the component that survives the affine projections.
  Matrix Z = N;
  Z.colwise() -= N.rowwise().mean();
  Z.rowwise() -= N.colwise().mean();
  Z.array() += N.mean();
  const double peak = Z.cwiseAbs().maxCoeff();
  double scale = peak > 0.0 ? noise_level * out.truth.minCoeff() / peak : 0.0;
  if (M.kind() == ManifoldKind::DefiniteSymmetricStochastic && peak > 0.0) {
    // Z moves the spectrum by at most its spectral norm.
    const double spectral = Eigen::SelfAdjointEigenSolver<Matrix>(Z).eigenvalues().cwiseAbs().maxCoeff();
    scale = std::min(scale, noise_level * min_eigenvalue(out.truth) / spectral);
  }
  out.A = out.truth + scale * N;
  return out;
}

// ---------------------------------------------------------------------------
// Birkhoff polytope projection.

namespace {

Matrix project_affine(const Matrix& Y) {
  const Index n = Y.rows();
  const double nn = static_cast<double>(n);
  const Vector R = Vector::Ones(n) - Y.rowwise().sum();
  const Vector C = Vector::Ones(n) - Y.colwise().sum().transpose();
  const double s = R.sum();
  Matrix P = Y;
  P.colwise() += R / nn;
  P.rowwise() += C.transpose() / nn;
  P.array() -= s / (nn * nn);
  return P;
}

}  // namespace

double birkhoff_kkt_residual(const Matrix& A, const Matrix& X, double support_tol) {
  require_square(X, "birkhoff_kkt_residual");
  require_same_shape(A, X, "birkhoff_kkt_residual");
  const Index n = X.rows();
  double res = std::max(0.0, -X.minCoeff());
  res = std::max({res, row_sum_residual(X), col_sum_residual(X)});

  // Least-squares multipliers (r, c) with G_ij = r_i + c_j on the support.
  const Matrix G = X - A;
  Matrix N = Matrix::Zero(2 * n, 2 * n);
  Vector b = Vector::Zero(2 * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (X(i, j) <= support_tol) continue;
      N(i, i) += 1.0;
      N(n + j, n + j) += 1.0;
      N(i, n + j) += 1.0;
      N(n + j, i) += 1.0;
      b(i) += G(i, j);
      b(n + j) += G(i, j);
    }
  const Vector rc = N.completeOrthogonalDecomposition().solve(b);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double lam = G(i, j) - rc(i) - rc(n + j);
      if (X(i, j) > support_tol) {
        res = std::max(res, std::abs(lam));
      } else {
        res = std::max(res, -lam);
      }
    }
  return res;
}

DykstraResult dykstra_birkhoff_projection(const Matrix& A, double tol, int max_iter) {
  require_square(A, "dykstra_birkhoff_projection");
  require_finite(A, "dykstra_birkhoff_projection");
  const Index n = A.rows();
  Matrix x = A;
  Matrix p = Matrix::Zero(n, n);
  Matrix q = Matrix::Zero(n, n);
  DykstraResult out;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix y = project_affine(x + p);
    p += x - y;
    const Matrix z = y + q;
    x = z.cwiseMax(0.0);
    q = z - x;
    if (it % 25 == 0 || it == max_iter) {
      res = birkhoff_kkt_residual(A, x);
      if (res <= tol) {
        out.X = x;
        out.iterations = it;
        out.kkt_residual = res;
        return out;
      }
    }
  }
  std::ostringstream os;
  os << "dykstra_birkhoff_projection: KKT residual " << res << " after " << max_iter
     << " sweeps";
  throw NumericalError(os.str(), res);
}

// ---------------------------------------------------------------------------
// Convex clustering.

namespace {

struct Spectrum {
  Vector values;
  Matrix vectors;
};

Spectrum symmetric_spectrum(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(X));
  if (es.info() != Eigen::Success) {
    throw NumericalError("convex_cluster_objective: eigensolver failed", 0.0);
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

// Derivative of g(l) = |l| - l.
double excess_slope(double l) { return l > 0.0 ? 0.0 : (l < 0.0 ? -2.0 : -1.0); }

bool has_spectral_term(const ConvexClusterParams& p) {
  return p.formulation != ClusterFormulation::PSDConstrained && p.rho != 0.0;
}

}  // namespace

double nuclear_excess(const Matrix& X, double rho) {
  const Vector l = symmetric_spectrum(X).values;
  return rho * (l.cwiseAbs() - l).sum();
}

double convex_cluster_original_cost(const Matrix& A, const Matrix& X, double lambda) {
  require_same_shape(A, X, "convex_cluster_original_cost");
  return (A - X).squaredNorm() + lambda * X.trace();
}

Objective convex_cluster_objective(const Matrix& A, const ConvexClusterParams& p) {
  require_square(A, "convex_cluster_objective");
  require_finite(A, "convex_cluster_objective");
  if (asymmetry(A) > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    throw DomainError("convex_cluster_objective: A must be symmetric");
  }
  if (A.minCoeff() < 0.0) throw DomainError("convex_cluster_objective: A must be nonnegative");
  if (p.lambda < 0.0 || p.rho < 0.0 || p.mu < 0.0) {
    throw DomainError("convex_cluster_objective: lambda, rho, mu must be >= 0");
  }
  const bool spectral = has_spectral_term(p);
  const bool skew = p.formulation == ClusterFormulation::NuclearRegularizedDS && p.mu != 0.0;

  Objective f;
  f.value = [A, p, spectral, skew](const Matrix& X) {
    double v = (A - X).squaredNorm() + p.lambda * X.trace();
    if (spectral) v += nuclear_excess(X, p.rho);
    if (skew) v += p.mu * (X - X.transpose()).squaredNorm();
    return v;
  };
  f.egrad = [A, p, spectral, skew](const Matrix& X) -> Matrix {
    const Index n = X.rows();
    Matrix g = 2.0 * (X - A) + p.lambda * Matrix::Identity(n, n);
    if (spectral) {
      const Spectrum s = symmetric_spectrum(X);
      const Vector d = s.values.unaryExpr(&excess_slope);
      g += p.rho * symmetric_part(s.vectors * d.asDiagonal() * s.vectors.transpose());
    }
    if (skew) g += 4.0 * p.mu * (X - X.transpose());
    return g;
  };
  f.ehess = [p, spectral, skew](const Matrix& X, const Matrix& xi) -> Matrix {
    Matrix h = 2.0 * xi;
    if (spectral) {
      // Daleckii-Krein: first divided differences of g' on the spectrum.
      const Spectrum s = symmetric_spectrum(X);
      const Index n = X.rows();
      const Vector d = s.values.unaryExpr(&excess_slope);
      Matrix T = s.vectors.transpose() * symmetric_part(xi) * s.vectors;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          const double dl = s.values(i) - s.values(j);
          T(i, j) *= (d(i) == d(j) || dl == 0.0) ? 0.0 : (d(i) - d(j)) / dl;
        }
      h += p.rho * symmetric_part(s.vectors * T * s.vectors.transpose());
    }
    if (skew) h += 4.0 * p.mu * (xi - xi.transpose());
    return h;
  };
  if (spectral) {
    const double gap = p.eig_gap_tol;
    f.hessian_smooth_at = [gap](const Matrix& X) {
      return symmetric_spectrum(X).values.cwiseAbs().minCoeff() > gap;
    };
  }
  return f;
}

// ---------------------------------------------------------------------------
// Low-rank decomposition.

Objective lowrank_objective(const Matrix& A, const LowRankParams& p) {
  require_square(A, "lowrank_objective");
  require_finite(A, "lowrank_objective");
  if (A.minCoeff() < 0.0) throw DomainError("lowrank_objective: A must be nonnegative");
  if (!(p.alpha > 1.0)) throw DomainError("lowrank_objective: alpha must exceed 1");
  const double am1 = p.alpha - 1.0;
  Objective f;
  f.value = [A, am1](const Matrix& X) {
    if (!(X.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
    const Vector dinv = X.colwise().sum().transpose().cwiseInverse();
    const Matrix W = X * dinv.asDiagonal() * X.transpose();
    return -(A.array() * W.array().log()).sum() - am1 * X.array().log().sum();
  };
  f.egrad = [A, am1](const Matrix& X) -> Matrix {
    require_positive(X, "lowrank_objective");
    const Vector dinv = X.colwise().sum().transpose().cwiseInverse();
    const Matrix W = X * dinv.asDiagonal() * X.transpose();
    const Matrix Q = A.cwiseQuotient(W);
    const Matrix QX = (Q + Q.transpose()) * X;
    const Vector diagXQX = (X.transpose() * Q * X).diagonal();
    Matrix g = -QX * dinv.asDiagonal();
    g.rowwise() += diagXQX.cwiseProduct(dinv).cwiseProduct(dinv).transpose();
    g -= am1 * X.cwiseInverse();
    return g;
  };
  return f;
}

Matrix balanced_start(const Matrix& A, ManifoldKind kind) {
  require_square(A, "balanced_start");
  Matrix B = dad_balance(symmetric_part(A)).balanced;
  B = symmetric_part(B);
  if (kind == ManifoldKind::DoublyStochastic) return B;
  if (kind == ManifoldKind::DefiniteSymmetricStochastic) {
    constexpr double target = 0.05;
    const double lmin = min_eigenvalue(B);
    if (lmin < target) {
      const double c = (target - lmin) / (1.0 - target);
      B = (B + c * Matrix::Identity(B.rows(), B.cols())) / (1.0 + c);
    }
  }
  return B;
}

// ---------------------------------------------------------------------------
// Block model.

BlockModel block_model_generate(const BlockModelSpec& s) {
  if (s.k < 1 || s.n < s.k) throw DomainError("block_model_generate: need 1 <= k <= n");
  if (!(s.p_out >= 0.0 && s.p_out < s.p_in && s.p_in <= 1.0)) {
    throw DomainError("block_model_generate: need 0 <= p_out < p_in <= 1");
  }
  if (!(s.noise_sigma >= 0.0) || !(s.clip_floor >= 0.0)) {
    throw DomainError("block_model_generate: sigma and clip floor must be >= 0");
  }
  BlockModel out;
  out.labels.resize(static_cast<std::size_t>(s.n));
  const Index base = s.n / s.k, extra = s.n % s.k;
  Index pos = 0;
  for (Index c = 0; c < s.k; ++c) {
    const Index size = base + (c < extra ? 1 : 0);
    for (Index t = 0; t < size; ++t) out.labels[static_cast<std::size_t>(pos++)] = static_cast<int>(c);
  }
  Rng rng(s.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  out.A.resize(s.n, s.n);
  for (Index i = 0; i < s.n; ++i)
    for (Index j = i; j < s.n; ++j) {
      const bool same = out.labels[static_cast<std::size_t>(i)] == out.labels[static_cast<std::size_t>(j)];
      double v = same ? s.p_in : s.p_out;
      if (s.noise_sigma > 0.0) v += s.noise_sigma * noise(rng);
      v = std::max(v, s.clip_floor);
      out.A(i, j) = v;
      out.A(j, i) = v;
    }
  return out;
}

Matrix block_indicator_point(const std::vector<int>& labels) {
  const Index n = static_cast<Index>(labels.size());
  std::vector<double> size;
  for (int l : labels) {
    if (l < 0) throw DomainError("block_indicator_point: negative label");
    if (static_cast<std::size_t>(l) >= size.size()) size.resize(static_cast<std::size_t>(l) + 1, 0.0);
    size[static_cast<std::size_t>(l)] += 1.0;
  }
  Matrix X = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)])
        X(i, j) = 1.0 / size[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  return X;
}

}  // namespace birkhoff
