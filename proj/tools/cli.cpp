#include "cli.hpp"

#include "bench.hpp"
#include "config.hpp"
#include "matrix_io.hpp"
#include "runner.hpp"
#include "suites.hpp"

#include "birkhoff/problems.hpp"

#include <CLI11.hpp>

#include <map>
#include <optional>
#include <ostream>

namespace birkhoff::cli {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Output {
  std::string dir;
  void write(const std::string& name, const std::string& text) const {
    if (dir.empty()) return;
    write_text_file(join_path(dir, name), text);
  }
  void matrix(const std::string& name, const Matrix& M) const {
    if (!dir.empty()) save_matrix(join_path(dir, name), M);
  }
};

Output open_output(const RunConfig& cfg) {
  if (!cfg.out.empty()) ensure_directory(cfg.out);
  return Output{cfg.out};
}

Matrix load_input(const std::string& path) {
  Matrix A;
  try {
    A = load_matrix(path);
  } catch (const FormatError& e) {
    throw UsageError(std::string("input: ") + e.what());
  }
  if (A.rows() != A.cols() || A.rows() < 2) throw UsageError("input: need a square matrix, n >= 2");
  if (!A.allFinite()) throw UsageError("input: non-finite entries");
  return A;
}

double final_seconds(const SolverReport& r) {
  return r.trace.empty() ? 0.0 : r.trace.back().elapsed_s;
}

int cmd_denoise(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto M = make_manifold(parse_manifold(cfg.manifolds.front()));
  const SolverKind solver = parse_solver(cfg.solvers.front());
  const SolverOptions opts = solver_options(cfg, *M);
  Matrix A;
  if (!cfg.input.empty()) {
    A = load_input(cfg.input);
    if (M->kind() != ManifoldKind::DoublyStochastic) A = symmetric_part(A);
  } else {
    A = make_denoise_instance(*M, cfg.n.front(), cfg.seed, cfg.noise).A;
  }
  const Index n = A.rows();
  const Output o = open_output(cfg);
  Rng rng(cfg.seed + 1);
  const Matrix X0 = M->random_point(rng, n);
  const SolverReport r = run_solver(solver, *M, denoise_objective(A), X0, opts);

  const std::string summary =
      "n,manifold,solver,iterations,seconds,final_cost,final_grad_norm,status\n" +
      std::to_string(n) + "," + cfg.manifolds.front() + "," + cfg.solvers.front() + "," +
      std::to_string(r.iterations) + "," + format_double(final_seconds(r)) + "," +
      format_double(r.final_cost) + "," + format_double(r.final_grad_norm) + "," +
      to_string(r.status) + "\n";
  o.matrix("solution.txt", r.final_point.matrix);
  o.write("trace.csv", trace_csv(r.trace));
  o.write("summary.csv", summary);
  out << summary;
  if (r.status == SolverStatus::LineSearchFailure || r.status == SolverStatus::RetractionFailure) {
    err << "denoise: " << to_string(r.status) << ": " << r.message << "\n";
    return kFailure;
  }
  return kOk;
}

struct ClusterData {
  Matrix A;
  std::optional<std::vector<int>> truth;
};

ClusterData cluster_data(const RunConfig& cfg) {
  ClusterData d;
  if (!cfg.input.empty()) {
    d.A = symmetric_part(load_input(cfg.input));
    if (cfg.k > d.A.rows()) throw UsageError("k must not exceed the size of the input");
    return d;
  }
  BlockModelSpec spec;
  spec.n = cfg.n.front();
  spec.k = cfg.k;
  spec.p_in = cfg.p_in;
  spec.p_out = cfg.p_out;
  spec.noise_sigma = cfg.sigma;
  spec.seed = cfg.seed;
  BlockModel bm = block_model_generate(spec);
  d.A = std::move(bm.A);
  d.truth = std::move(bm.labels);
  return d;
}

std::string labels_csv(const std::vector<int>& labels, const std::optional<std::vector<int>>& truth) {
  std::string s = truth ? "index,label,truth\n" : "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += std::to_string(i) + "," + std::to_string(labels[i]);
    if (truth) s += "," + std::to_string((*truth)[i]);
    s += "\n";
  }
  return s;
}

std::string ari_field(const std::vector<int>& labels, const std::optional<std::vector<int>>& truth) {
  return truth ? format_double(adjusted_rand_index(labels, *truth)) : std::string("nan");
}

// Solver status is reported, not turned into an exit code: the nonsmooth
// objectives can end in a line-search stall at a usable point.
int cmd_cluster_convex(const RunConfig& cfg, std::ostream& out) {
  const ClusterData d = cluster_data(cfg);
  const Index n = d.A.rows();
  ConvexClusterParams p;
  p.lambda = cfg.lambda;
  p.rho = cfg.rho;
  p.mu = cfg.mu;
  ManifoldKind kind = ManifoldKind::SymmetricStochastic;
  if (cfg.formulation == "ds") {
    p.formulation = ClusterFormulation::NuclearRegularizedDS;
    kind = ManifoldKind::DoublyStochastic;
  } else if (cfg.formulation == "psd") {
    p.formulation = ClusterFormulation::PSDConstrained;
    kind = ManifoldKind::DefiniteSymmetricStochastic;
  }
  const auto M = make_manifold(kind);
  const SolverOptions opts = solver_options(cfg, *M);
  const Output o = open_output(cfg);
  const Matrix X0 = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const SolverReport r =
      run_solver(parse_solver(cfg.solvers.front()), *M, convex_cluster_objective(d.A, p), X0, opts);
  const Matrix& X = r.final_point.matrix;
  ClusterOptions copts;
  copts.seed = cfg.seed;
  const std::vector<int> labels = extract_clusters(X, cfg.k, copts);

  const std::string summary =
      "n,formulation,solver,iterations,seconds,objective,original_cost,ari,final_grad_norm,status\n" +
      std::to_string(n) + "," + cfg.formulation + "," + cfg.solvers.front() + "," +
      std::to_string(r.iterations) + "," + format_double(final_seconds(r)) + "," +
      format_double(r.final_cost) + "," +
      format_double(convex_cluster_original_cost(d.A, X, cfg.lambda)) + "," +
      ari_field(labels, d.truth) + "," + format_double(r.final_grad_norm) + "," +
      to_string(r.status) + "\n";
  o.matrix("solution.txt", X);
  o.write("trace.csv", trace_csv(r.trace));
  o.write("labels.csv", labels_csv(labels, d.truth));
  o.write("summary.csv", summary);
  out << summary;
  return kOk;
}

int cmd_cluster_lowrank(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ClusterData d = cluster_data(cfg);
  const Index n = d.A.rows();
  if ((d.A.array() <= 0.0).any()) throw UsageError("input: cluster-lowrank needs positive entries");
  const Objective f = lowrank_objective(d.A, LowRankParams{cfg.alpha});
  const Output o = open_output(cfg);

  // One start shared by every run; it lies in the definite manifold, hence
  // also in the symmetric one.
  Matrix X0;
  if (cfg.init == "balanced") {
    X0 = balanced_start(d.A, ManifoldKind::DefiniteSymmetricStochastic);
  } else {
    Rng rng(cfg.seed + 1);
    X0 = make_manifold(ManifoldKind::DefiniteSymmetricStochastic)->random_point(rng, n);
  }
  o.matrix("initial.txt", X0);

  std::string summary =
      "n,manifold,solver,iterations,seconds,final_cost,final_grad_norm,ari,status\n";
  for (const auto& mname : cfg.manifolds) {
    const auto M = make_manifold(parse_manifold(mname));
    SolverOptions opts = solver_options(cfg, *M);
    opts.certify_gradient = true;
    for (const auto& sname : cfg.solvers) {
      const SolverReport r = run_solver(parse_solver(sname), *M, f, X0, opts);
      ClusterOptions copts;
      copts.seed = cfg.seed;
      const std::vector<int> labels = extract_clusters(r.final_point.matrix, cfg.k, copts);
      const std::string tag = mname + "_" + sname;
      summary += std::to_string(n) + "," + mname + "," + sname + "," +
                 std::to_string(r.iterations) + "," + format_double(final_seconds(r)) + "," +
                 format_double(r.final_cost) + "," + format_double(r.final_grad_norm) + "," +
                 ari_field(labels, d.truth) + "," + to_string(r.status) + "\n";
      o.matrix("solution_" + tag + ".txt", r.final_point.matrix);
      o.write("trace_" + tag + ".csv", trace_csv(r.trace));
      o.write("labels_" + tag + ".csv", labels_csv(labels, d.truth));
      if (r.status == SolverStatus::RetractionFailure) {
        err << "cluster-lowrank: " << tag << ": " << r.message << "\n";
      }
    }
  }
  o.write("summary.csv", summary);
  out << summary;
  return kOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SuiteOptions so;
  so.manifolds = cfg.manifolds;
  so.n = cfg.n;
  so.draws = cfg.draws;
  so.seed = cfg.seed;
  so.inject_breach = cfg.inject_breach;
  const Output o = open_output(cfg);
  const SuiteReport rep = run_suites(so);
  const std::string csv = suite_report_csv(rep);
  o.write("check.csv", csv);
  out << csv;
  std::size_t failed = 0;
  for (const auto& r : rep.rows) failed += r.pass ? 0 : 1;
  err << "check: " << rep.rows.size() - failed << "/" << rep.rows.size() << " passed in "
      << rep.elapsed_s << " s\n";
  return rep.ok() ? kOk : kFailure;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const Output o = open_output(cfg);
  const BenchResult r = run_bench(cfg, bench_workers());
  o.write("bench.csv", bench_csv(r));
  o.write("bench_fit.csv", bench_fit_csv(r));
  out << bench_csv(r);
  if (!r.fits.empty()) out << "\n" << bench_fit_csv(r);
  return kOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "denoise") return cmd_denoise(cfg, out, err);
  if (cfg.command == "cluster-convex") return cmd_cluster_convex(cfg, out);
  if (cfg.command == "cluster-lowrank") return cmd_cluster_lowrank(cfg, out, err);
  if (cfg.command == "check") return cmd_check(cfg, out, err);
  return cmd_bench(cfg, out);
}

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d = {
      {"denoise", "Project a noisy matrix onto a manifold by Riemannian optimization"},
      {"cluster-convex", "Convex similarity clustering on a block model or input matrix"},
      {"cluster-lowrank", "Low-rank similarity clustering with first-order solvers"},
      {"check", "Run the randomized geometry invariant suites"},
      {"bench", "Time solver iterations over a grid of sizes"},
  };
  return d;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Riemannian optimization over doubly stochastic, symmetric stochastic and "
               "definite symmetric stochastic matrices"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::string config;
    bool dump = false;
    bool list = false;
  };
  std::map<std::string, Sub> subs;
  for (const auto& [name, text] : descriptions()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, text);
    for (const auto& key : config_keys(name)) {
      s.app->add_option("--" + key, s.values[key], "default: " + get_setting(default_config(name), key));
    }
    s.app->add_option("--config", s.config, "key=value file applied before the flags");
    s.app->add_flag("--dump-config", s.dump, "print the resolved configuration and exit");
    if (name == "check") s.app->add_flag("--list", s.list, "print the suite names and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      if (s.list) {
        for (const auto& suite : suite_names()) out << suite << "\n";
        return kOk;
      }
      RunConfig cfg = default_config(name);
      if (!s.config.empty()) apply_config_file(cfg, s.config);
      for (const auto& key : config_keys(name)) {
        if (s.app->count("--" + key) > 0) apply_setting(cfg, key, s.values[key]);
      }
      validate(cfg);
      if (s.dump) {
        out << serialize(cfg);
        return kOk;
      }
      return dispatch(cfg, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace birkhoff::cli
