#pragma once

// Run configuration shared by every subcommand: flat key=value settings that
// can come from a config file and be overridden by command-line flags.

#include "birkhoff/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace birkhoff::cli {

/// Bad flag, bad value, unknown key: exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::vector<std::string> manifolds{"ds"};
  std::vector<std::string> solvers{"cg"};
  std::vector<long long> n{20};
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 1000;
  std::string retraction = "auto";
  std::string cg_rule = "pr+";
  double lambda = 0.5;
  double rho = 1.0;
  double mu = 1.0;
  double alpha = 1.05;
  std::string out;
  bool timing = true;
  std::string input;
  double noise = 0.5;
  long long k = 3;
  double p_in = 0.7;
  double p_out = 0.2;
  double sigma = 0.2;
  std::string formulation = "sym";
  std::string init = "balanced";
  int reps = 5;
  int iters = 10;
  int draws = 100;
  std::string inject_breach;

  bool operator==(const RunConfig&) const = default;
};

/// Defaults for a subcommand (some differ from the struct defaults).
RunConfig default_config(const std::string& command);

/// Keys accepted by a subcommand, in serialization order.
const std::vector<std::string>& config_keys(const std::string& command);

/// Parses and validates one setting; throws UsageError for unknown keys or
/// malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

std::string get_setting(const RunConfig& cfg, const std::string& key);

/// key=value lines; blank lines and lines starting with '#' are skipped.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::string& path);

/// Every key of the subcommand as key=value lines; apply_config_text on the
/// result reproduces cfg.
std::string serialize(const RunConfig& cfg);

/// Range checks that span keys (e.g. n >= 2); throws UsageError.
void validate(const RunConfig& cfg);

}  // namespace birkhoff::cli
