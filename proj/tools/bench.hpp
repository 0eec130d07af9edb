#pragma once

// Per-iteration timing of the solvers on denoising instances over a grid of
// sizes, with a log-log fit of time against n.

#include "config.hpp"

#include <string>
#include <vector>

namespace birkhoff::cli {

struct BenchCell {
  long long n = 0;
  std::string manifold;
  std::string solver;
  double median_us_per_iter = 0.0;
  int iterations = 0;  // of the last repetition
};

struct BenchFit {
  std::string manifold;
  std::string solver;
  double exponent = 0.0;
  long long n_min = 0;
  long long n_max = 0;
};

struct BenchResult {
  std::vector<BenchCell> cells;
  std::vector<BenchFit> fits;  // one per (manifold, solver) with two or more sizes
};

/// Worker count: hardware concurrency, capped by BIRKHOFF_OPT_THREADS when
/// that is a positive integer.
int bench_workers();

/// Each cell runs `iters` iterations `reps` times from the same start and
/// reports the median wall time per iteration.
BenchResult run_bench(const RunConfig& cfg, int workers);

/// Header n,manifold,solver,median_us_per_iter
std::string bench_csv(const BenchResult& r);
/// Header manifold,solver,exponent,n_min,n_max
std::string bench_fit_csv(const BenchResult& r);

}  // namespace birkhoff::cli
