#pragma once

// Benchmark objectives, the block-model generator and the Dykstra projection
// used as an independent optimum for the denoising problem.

#include "birkhoff/manifold.hpp"

#include <cstdint>
#include <vector>

namespace birkhoff {

/// ||A - X||_F^2
Objective denoise_objective(const Matrix& A);

struct DenoiseInstance {
  Matrix truth;  // the feasible M
  Matrix A;      // M + N
};

/// A = M + N with M a random point of the manifold blended halfway towards
/// the uniform matrix, and N Gaussian noise taken to the embedding space and
/// scaled so that its zero-sum part moves no entry of M by more than
/// `noise_level * min(M)`; on the definite manifold it also shifts no
/// eigenvalue by more than `noise_level * lambda_min(M)`. With
/// noise_level < 1 the constrained optimum is then interior and a smooth
/// stationary point.
DenoiseInstance make_denoise_instance(const Manifold& M, Index n, std::uint64_t seed,
                                      double noise_level = 0.5);

struct DykstraResult {
  Matrix X;
  int iterations = 0;
  double kkt_residual = 0.0;
};

/// Frobenius projection of A onto the Birkhoff polytope
/// { X >= 0, X 1 = 1, X^T 1 = 1 } by Dykstra's alternating projections.
/// Throws NumericalError when the KKT residual is still above tol after
/// max_iter sweeps.
DykstraResult dykstra_birkhoff_projection(const Matrix& A, double tol = 1e-10,
                                          int max_iter = 200000);

/// Optimality residual of X as the projection of A onto the Birkhoff
/// polytope: primal infeasibility, stationarity on the support of X, and sign
/// of the multipliers of the active bounds. Entries <= support_tol count as
/// active.
double birkhoff_kkt_residual(const Matrix& A, const Matrix& X, double support_tol = 1e-9);

enum class ClusterFormulation { PSDConstrained, NuclearRegularizedSym, NuclearRegularizedDS };
std::string to_string(ClusterFormulation f);

struct ConvexClusterParams {
  double lambda = 0.5;
  double rho = 1.0;
  double mu = 1.0;
  ClusterFormulation formulation = ClusterFormulation::NuclearRegularizedSym;
  /// The Hessian is offered only when every eigenvalue of sym(X) is at
  /// least this far from zero.
  double eig_gap_tol = 1e-6;
};

/// ||A - X||^2 + lambda tr(X), plus rho (||S||_* - tr S) with S = sym(X) for
/// the regularized forms, plus mu ||X - X^T||^2 on DP_n.
Objective convex_cluster_objective(const Matrix& A, const ConvexClusterParams& p);

/// ||A - X||^2 + lambda tr(X), the cost shared by every formulation.
double convex_cluster_original_cost(const Matrix& A, const Matrix& X, double lambda);

/// rho * sum_i (|l_i| - l_i) over the eigenvalues of sym(X).
double nuclear_excess(const Matrix& X, double rho = 1.0);

struct LowRankParams {
  double alpha = 1.05;
};

/// -sum A_ij log W_ij - (alpha - 1) sum log X_ij with W = X D^{-1} X^T and
/// D the diagonal of column sums of X. First order only.
Objective lowrank_objective(const Matrix& A, const LowRankParams& p = {});

/// Symmetric balancing of a positive similarity matrix onto SP_n. For the
/// definite manifold the result is blended with I as (B + cI)/(1 + c) when
/// its smallest eigenvalue is below 0.05, with c lifting it to 0.05.
Matrix balanced_start(const Matrix& A, ManifoldKind kind);

struct BlockModelSpec {
  Index n = 30;
  Index k = 3;
  double p_in = 0.7;
  double p_out = 0.2;
  double noise_sigma = 0.2;
  double clip_floor = 1e-3;
  std::uint64_t seed = 0;
};

struct BlockModel {
  Matrix A;
  std::vector<int> labels;
};

/// Contiguous blocks whose sizes differ by at most one; A is symmetric with
/// p_in on the diagonal before noise.
BlockModel block_model_generate(const BlockModelSpec& spec);

/// Expected block matrix normalized to SP_n: blocks (1/m) 1 1^T.
Matrix block_indicator_point(const std::vector<int>& labels);

struct ClusterOptions {
  int restarts = 10;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

/// k-means (k-means++ seeding, best of `restarts`) on the rows of the top-k
/// eigenvectors of sym(X). Labels are renumbered in order of first
/// appearance.
std::vector<int> extract_clusters(const Matrix& X, Index k, const ClusterOptions& opts = {});

/// k-means on the rows of `points`; exposed for testing.
std::vector<int> kmeans(const Matrix& points, Index k, const ClusterOptions& opts = {});

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace birkhoff
