#pragma once

// Glue between RunConfig and the library: option translation and the CSV and
// file helpers shared by the subcommands.

#include "config.hpp"

#include "birkhoff/solvers.hpp"

#include <string>

namespace birkhoff::cli {

SolverKind parse_solver(const std::string& name);
std::string solver_flag(SolverKind kind);

/// Throws UsageError for a retraction the manifold does not have.
RetractionChoice parse_retraction(const std::string& name, const Manifold& M);
CgBetaRule parse_cg_rule(const std::string& name);

SolverOptions solver_options(const RunConfig& cfg, const Manifold& M);

/// Header iter,cost,grad_norm,step,elapsed_s
std::string trace_csv(const std::vector<TraceRecord>& trace);

/// Creates the directory (and parents) if needed; throws Error on failure.
void ensure_directory(const std::string& dir);
void write_text_file(const std::string& path, const std::string& text);
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace birkhoff::cli
