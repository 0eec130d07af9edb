#include "bench.hpp"

#include "matrix_io.hpp"
#include "runner.hpp"
#include "suites.hpp"

#include "birkhoff/problems.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <set>
#include <thread>

namespace birkhoff::cli {

int bench_workers() {
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BIRKHOFF_OPT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) workers = std::min(workers, cap);
  }
  return workers;
}

namespace {

BenchCell time_cell(const RunConfig& cfg, long long n, const std::string& mname,
                    const std::string& sname) {
  const auto M = make_manifold(parse_manifold(mname));
  const DenoiseInstance inst = make_denoise_instance(*M, n, cfg.seed);
  Rng rng(cfg.seed + 1);
  const Matrix X0 = M->random_point(rng, n);
  const Objective f = denoise_objective(inst.A);
  SolverOptions opts = solver_options(cfg, *M);
  opts.max_iter = cfg.iters;
  opts.grad_tol = 1e-300;
  opts.timing = false;
  const SolverKind kind = parse_solver(sname);

  std::vector<double> per_iter;
  BenchCell cell{n, mname, sname, 0.0, 0};
  for (int r = 0; r < cfg.reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const SolverReport rep = run_solver(kind, *M, f, X0, opts);
    const double us =
        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
    cell.iterations = rep.iterations;
    per_iter.push_back(us / std::max(1, rep.iterations));
  }
  std::sort(per_iter.begin(), per_iter.end());
  const std::size_t m = per_iter.size();
  cell.median_us_per_iter =
      m % 2 ? per_iter[m / 2] : 0.5 * (per_iter[m / 2 - 1] + per_iter[m / 2]);
  return cell;
}

}  // namespace

BenchResult run_bench(const RunConfig& cfg, int workers) {
  BenchResult result;
  for (long long n : cfg.n)
    for (const auto& m : cfg.manifolds)
      for (const auto& s : cfg.solvers) result.cells.push_back({n, m, s, 0.0, 0});

  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(result.cells.size());
  auto work = [&]() {
    for (std::size_t i = next++; i < result.cells.size(); i = next++) {
      BenchCell& c = result.cells[i];
      try {
        c = time_cell(cfg, c.n, c.manifold, c.solver);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(result.cells.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < w; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (!e.empty()) throw Error("bench: " + e);

  std::map<std::pair<std::string, std::string>, std::vector<const BenchCell*>> groups;
  for (const auto& c : result.cells) groups[{c.manifold, c.solver}].push_back(&c);
  for (const auto& m : cfg.manifolds) {
    for (const auto& s : cfg.solvers) {
      const auto& g = groups[{m, s}];
      std::vector<double> ns, ts;
      for (const BenchCell* c : g) {
        ns.push_back(static_cast<double>(c->n));
        ts.push_back(c->median_us_per_iter);
      }
      if (std::set<double>(ns.begin(), ns.end()).size() < 2) continue;
      BenchFit fit{m, s, loglog_slope(ns, ts), 0, 0};
      fit.n_min = static_cast<long long>(*std::min_element(ns.begin(), ns.end()));
      fit.n_max = static_cast<long long>(*std::max_element(ns.begin(), ns.end()));
      result.fits.push_back(fit);
    }
  }
  return result;
}

std::string bench_csv(const BenchResult& r) {
  std::string out = "n,manifold,solver,median_us_per_iter\n";
  for (const auto& c : r.cells)
    out += std::to_string(c.n) + "," + c.manifold + "," + c.solver + "," +
           format_double(c.median_us_per_iter) + "\n";
  return out;
}

std::string bench_fit_csv(const BenchResult& r) {
  std::string out = "manifold,solver,exponent,n_min,n_max\n";
  for (const auto& f : r.fits)
    out += f.manifold + "," + f.solver + "," + format_double(f.exponent) + "," +
           std::to_string(f.n_min) + "," + std::to_string(f.n_max) + "\n";
  return out;
}

}  // namespace birkhoff::cli
