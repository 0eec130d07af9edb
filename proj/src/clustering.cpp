#include "birkhoff/problems.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>

namespace birkhoff {

namespace {

std::vector<int> renumber(const std::vector<int>& labels) {
  std::map<int, int> seen;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = seen.find(labels[i]);
    if (it == seen.end()) it = seen.emplace(labels[i], static_cast<int>(seen.size())).first;
    out[i] = it->second;
  }
  return out;
}

struct KmeansRun {
  std::vector<int> labels;
  double inertia = 0.0;
};

KmeansRun kmeans_once(const Matrix& P, Index k, int max_iter, Rng& rng) {
  const Index m = P.rows();
  Matrix C(k, P.cols());
  std::uniform_int_distribution<Index> pick(0, m - 1);
  C.row(0) = P.row(pick(rng));
  Vector d2 = (P.rowwise() - C.row(0)).rowwise().squaredNorm();
  for (Index c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng), acc = 0.0;
      chosen = m - 1;
      for (Index i = 0; i < m; ++i) {
        acc += d2(i);
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    C.row(c) = P.row(chosen);
    d2 = d2.cwiseMin((P.rowwise() - C.row(c)).rowwise().squaredNorm());
  }

  KmeansRun run;
  run.labels.assign(static_cast<std::size_t>(m), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    run.inertia = 0.0;
    for (Index i = 0; i < m; ++i) {
      Index best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < k; ++c) {
        const double d = (P.row(i) - C.row(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      run.inertia += bd;
      if (run.labels[static_cast<std::size_t>(i)] != static_cast<int>(best)) {
        run.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sum = Matrix::Zero(k, P.cols());
    Vector count = Vector::Zero(k);
    for (Index i = 0; i < m; ++i) {
      sum.row(run.labels[static_cast<std::size_t>(i)]) += P.row(i);
      count(run.labels[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (Index c = 0; c < k; ++c)
      if (count(c) > 0.0) C.row(c) = sum.row(c) / count(c);
  }
  return run;
}

}  // namespace

std::vector<int> kmeans(const Matrix& points, Index k, const ClusterOptions& opts) {
  if (k < 1 || k > points.rows()) throw DomainError("kmeans: need 1 <= k <= number of points");
  Rng rng(opts.seed);
  KmeansRun best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    KmeansRun run = kmeans_once(points, k, opts.max_iter, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return renumber(best.labels);
}

std::vector<int> extract_clusters(const Matrix& X, Index k, const ClusterOptions& opts) {
  require_square(X, "extract_clusters");
  require_finite(X, "extract_clusters");
  if (k < 1 || k > X.rows()) throw DomainError("extract_clusters: need 1 <= k <= n");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(X));
  if (es.info() != Eigen::Success) throw NumericalError("extract_clusters: eigensolver failed", 0.0);
  const Matrix U = es.eigenvectors().rightCols(k);
  return kmeans(U, k, opts);
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw ShapeError("adjusted_rand_index: label vectors differ in length");
  const std::vector<int> ra = renumber(a), rb = renumber(b);
  int ka = 0, kb = 0;
  for (int v : ra) ka = std::max(ka, v + 1);
  for (int v : rb) kb = std::max(kb, v + 1);
  Matrix table = Matrix::Zero(ka, kb);
  for (std::size_t i = 0; i < ra.size(); ++i) table(ra[i], rb[i]) += 1.0;
  if (a.size() < 2) return 1.0;
  auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0;
  for (Index i = 0; i < table.rows(); ++i)
    for (Index j = 0; j < table.cols(); ++j) index += comb2(table(i, j));
  double sa = 0.0, sb = 0.0;
  for (Index i = 0; i < table.rows(); ++i) sa += comb2(table.row(i).sum());
  for (Index j = 0; j < table.cols(); ++j) sb += comb2(table.col(j).sum());
  const double expected = sa * sb / comb2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace birkhoff
