#pragma once

// Randomized geometry checks shared by the check subcommand and the
// acceptance run. Each suite reports its worst statistic over all draws for
// one (manifold, n) cell against a fixed threshold.

#include "birkhoff/manifold.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace birkhoff::cli {

struct SuiteRow {
  std::string suite;
  std::string manifold;
  long long n = 0;
  double value = 0.0;
  double threshold = 0.0;
  bool at_least = false;  // pass means value >= threshold instead of <=
  bool pass = false;
};

struct SuiteOptions {
  std::vector<std::string> manifolds{"ds", "sym", "psd"};
  std::vector<long long> n{2, 3, 5, 10, 20};
  int draws = 100;
  std::uint64_t seed = 0;
  /// Suite name (or "all") whose threshold is replaced by an impossible one.
  std::string inject_breach;
};

struct SuiteReport {
  std::vector<SuiteRow> rows;
  double elapsed_s = 0.0;
  bool ok() const;
};

const std::vector<std::string>& suite_names();

ManifoldKind parse_manifold(const std::string& name);
std::string manifold_flag(ManifoldKind kind);

/// Least-squares slope of log(e) against log(t).
double loglog_slope(const std::vector<double>& t, const std::vector<double>& e);

/// Throws UsageError for an unknown manifold or breach target.
SuiteReport run_suites(const SuiteOptions& opts);

/// CSV with header suite,manifold,n,value,threshold,relation,pass.
std::string suite_report_csv(const SuiteReport& report);

}  // namespace birkhoff::cli
