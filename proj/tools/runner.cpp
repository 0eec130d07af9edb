#include "runner.hpp"

#include "matrix_io.hpp"

#include <filesystem>
#include <fstream>

namespace birkhoff::cli {

SolverKind parse_solver(const std::string& name) {
  if (name == "gd") return SolverKind::GradientDescent;
  if (name == "cg") return SolverKind::ConjugateGradient;
  if (name == "newton") return SolverKind::Newton;
  if (name == "tr") return SolverKind::TrustRegion;
  throw UsageError("unknown solver '" + name + "'");
}

std::string solver_flag(SolverKind kind) {
  switch (kind) {
    case SolverKind::GradientDescent: return "gd";
    case SolverKind::ConjugateGradient: return "cg";
    case SolverKind::Newton: return "newton";
    case SolverKind::TrustRegion: return "tr";
  }
  return "?";
}

RetractionChoice parse_retraction(const std::string& name, const Manifold& M) {
  if (name == "auto") return RetractionChoice::Auto;
  if (name == "canonical") return RetractionChoice::Canonical;
  if (name == "balanced") return RetractionChoice::Balanced;
  if (name == "expm") {
    if (M.kind() != ManifoldKind::DefiniteSymmetricStochastic) {
      throw UsageError("retraction: expm is only available on psd");
    }
    return RetractionChoice::ExpmAuto;
  }
  throw UsageError("unknown retraction '" + name + "'");
}

CgBetaRule parse_cg_rule(const std::string& name) {
  if (name == "fr") return CgBetaRule::FletcherReeves;
  if (name == "pr+") return CgBetaRule::PolakRibierePlus;
  if (name == "hs") return CgBetaRule::HestenesStiefel;
  throw UsageError("unknown cg-rule '" + name + "'");
}

SolverOptions solver_options(const RunConfig& cfg, const Manifold& M) {
  SolverOptions o;
  o.grad_tol = cfg.tol;
  o.max_iter = cfg.max_iter;
  o.retraction = parse_retraction(cfg.retraction, M);
  o.cg.rule = parse_cg_rule(cfg.cg_rule);
  o.timing = cfg.timing;
  return o;
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "iter,cost,grad_norm,step,elapsed_s\n";
  for (const auto& r : trace) {
    out += std::to_string(r.iter) + "," + format_double(r.cost) + "," +
           format_double(r.grad_norm) + "," + format_double(r.step) + "," +
           format_double(r.elapsed_s) + "\n";
  }
  return out;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw Error("cannot write " + path);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace birkhoff::cli
