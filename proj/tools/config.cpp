#include "config.hpp"

#include "matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace birkhoff::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw UsageError(key + ": empty list item in '" + value + "'");
    out.push_back(item);
  }
  if (out.empty()) throw UsageError(key + ": empty list");
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw UsageError(key + ": not a valid number: '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  const double x = parse_number<double>(key, v);
  if (!std::isfinite(x)) throw UsageError(key + ": value must be finite");
  return x;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw UsageError(key + ": " + what);
}

std::string one_of(const std::string& key, const std::string& v,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return v;
  std::string msg = key + ": '" + v + "' is not one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw UsageError(msg);
}

bool parse_switch(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw UsageError(key + ": expected on or off, got '" + v + "'");
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    auto real = [&t](const std::string& key, double RunConfig::* m,
                     std::function<bool(double)> ok, const char* what) {
      t[key] = {[=](RunConfig& c, const std::string& v) {
                  const double x = parse_real(key, v);
                  require(ok(x), key, what);
                  c.*m = x;
                },
                [=](const RunConfig& c) { return format_double(c.*m); }};
    };
    auto integer = [&t](const std::string& key, int RunConfig::* m, int lo) {
      t[key] = {[=](RunConfig& c, const std::string& v) {
                  const int x = parse_number<int>(key, v);
                  require(x >= lo, key, "must be at least " + std::to_string(lo));
                  c.*m = x;
                },
                [=](const RunConfig& c) { return std::to_string(c.*m); }};
    };
    auto text = [&t](const std::string& key, std::string RunConfig::* m,
                     std::initializer_list<const char*> allowed) {
      std::vector<std::string> opts(allowed.begin(), allowed.end());
      t[key] = {[=](RunConfig& c, const std::string& v) {
                  if (!opts.empty() &&
                      std::find(opts.begin(), opts.end(), v) == opts.end()) {
                    std::string msg = key + ": '" + v + "' is not one of";
                    for (const auto& a : opts) msg += " " + a;
                    throw UsageError(msg);
                  }
                  c.*m = v;
                },
                [=](const RunConfig& c) { return c.*m; }};
    };

    t["manifold"] = {[](RunConfig& c, const std::string& v) {
                       auto items = split_list("manifold", v);
                       for (const auto& s : items) one_of("manifold", s, {"ds", "sym", "psd"});
                       c.manifolds = items;
                     },
                     [](const RunConfig& c) { return join(c.manifolds); }};
    t["solver"] = {[](RunConfig& c, const std::string& v) {
                     auto items = split_list("solver", v);
                     for (const auto& s : items) one_of("solver", s, {"gd", "cg", "newton", "tr"});
                     c.solvers = items;
                   },
                   [](const RunConfig& c) { return join(c.solvers); }};
    t["n"] = {[](RunConfig& c, const std::string& v) {
                std::vector<long long> ns;
                for (const auto& s : split_list("n", v)) {
                  const long long x = parse_number<long long>("n", s);
                  require(x >= 2, "n", "matrix size must be at least 2");
                  ns.push_back(x);
                }
                c.n = ns;
              },
              [](const RunConfig& c) {
                std::vector<std::string> s;
                for (long long x : c.n) s.push_back(std::to_string(x));
                return join(s);
              }};
    t["seed"] = {[](RunConfig& c, const std::string& v) {
                   c.seed = parse_number<std::uint64_t>("seed", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    t["timing"] = {[](RunConfig& c, const std::string& v) { c.timing = parse_switch("timing", v); },
                   [](const RunConfig& c) { return std::string(c.timing ? "on" : "off"); }};
    t["k"] = {[](RunConfig& c, const std::string& v) {
                const long long x = parse_number<long long>("k", v);
                require(x >= 1, "k", "must be at least 1");
                c.k = x;
              },
              [](const RunConfig& c) { return std::to_string(c.k); }};

    auto positive = [](double x) { return x > 0.0; };
    auto nonneg = [](double x) { return x >= 0.0; };
    auto prob = [](double x) { return x >= 0.0 && x <= 1.0; };
    real("tol", &RunConfig::tol, positive, "must be positive");
    real("lambda", &RunConfig::lambda, nonneg, "must be nonnegative");
    real("rho", &RunConfig::rho, nonneg, "must be nonnegative");
    real("mu", &RunConfig::mu, nonneg, "must be nonnegative");
    real("alpha", &RunConfig::alpha, [](double x) { return x > 1.0; }, "must exceed 1");
    real("noise", &RunConfig::noise, [](double x) { return x >= 0.0 && x < 1.0; },
         "must lie in [0, 1)");
    real("p-in", &RunConfig::p_in, prob, "must lie in [0, 1]");
    real("p-out", &RunConfig::p_out, prob, "must lie in [0, 1]");
    real("sigma", &RunConfig::sigma, nonneg, "must be nonnegative");
    integer("max-iter", &RunConfig::max_iter, 0);
    integer("reps", &RunConfig::reps, 1);
    integer("iters", &RunConfig::iters, 1);
    integer("draws", &RunConfig::draws, 1);
    text("retraction", &RunConfig::retraction, {"auto", "canonical", "balanced", "expm"});
    text("cg-rule", &RunConfig::cg_rule, {"fr", "pr+", "hs"});
    text("formulation", &RunConfig::formulation, {"sym", "ds", "psd"});
    text("init", &RunConfig::init, {"balanced", "random"});
    text("out", &RunConfig::out, {});
    text("input", &RunConfig::input, {});
    text("inject-breach", &RunConfig::inject_breach, {});
    return t;
  }();
  return table;
}

const std::map<std::string, std::vector<std::string>>& command_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"denoise",
       {"manifold", "solver", "n", "seed", "tol", "max-iter", "retraction", "cg-rule", "noise",
        "input", "out", "timing"}},
      {"cluster-convex",
       {"formulation", "solver", "n", "k", "p-in", "p-out", "sigma", "lambda", "rho", "mu",
        "seed", "tol", "max-iter", "retraction", "cg-rule", "input", "out", "timing"}},
      {"cluster-lowrank",
       {"manifold", "solver", "n", "k", "p-in", "p-out", "sigma", "alpha", "init", "seed",
        "tol", "max-iter", "retraction", "cg-rule", "input", "out", "timing"}},
      {"check", {"manifold", "n", "draws", "seed", "inject-breach", "out"}},
      {"bench",
       {"manifold", "solver", "n", "reps", "iters", "seed", "retraction", "cg-rule", "out"}},
  };
  return keys;
}

}  // namespace

RunConfig default_config(const std::string& command) {
  if (!command_keys().count(command)) throw UsageError("unknown subcommand '" + command + "'");
  RunConfig c;
  c.command = command;
  if (command == "cluster-convex") {
    c.n = {30};
    c.max_iter = 1000;
  } else if (command == "cluster-lowrank") {
    c.manifolds = {"sym", "psd"};
    c.solvers = {"gd", "cg"};
    c.n = {30};
    c.max_iter = 500;
  } else if (command == "check") {
    c.manifolds = {"ds", "sym", "psd"};
    c.n = {2, 3, 5, 10, 20};
  } else if (command == "bench") {
    c.manifolds = {"ds", "sym", "psd"};
    c.solvers = {"gd", "cg"};
    c.n = {50, 100, 200};
  }
  return c;
}

const std::vector<std::string>& config_keys(const std::string& command) {
  const auto it = command_keys().find(command);
  if (it == command_keys().end()) throw UsageError("unknown subcommand '" + command + "'");
  return it->second;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& keys = config_keys(cfg.command);
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw UsageError("unknown key '" + key + "' for " + cfg.command);
  }
  fields().at(key).set(cfg, value);
}

std::string get_setting(const RunConfig& cfg, const std::string& key) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw UsageError("unknown key '" + key + "'");
  return it->second.get(cfg);
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  apply_config_text(cfg, ss.str());
}

std::string serialize(const RunConfig& cfg) {
  std::string out;
  for (const auto& key : config_keys(cfg.command)) out += key + "=" + get_setting(cfg, key) + "\n";
  return out;
}

void validate(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "denoise" || c == "cluster-convex" || c == "cluster-lowrank") {
    if (cfg.n.size() != 1) throw UsageError("n: " + c + " takes a single size");
  }
  if (c == "denoise" && (cfg.manifolds.size() != 1 || cfg.solvers.size() != 1)) {
    throw UsageError("denoise takes a single manifold and solver");
  }
  if (c == "cluster-convex" && cfg.solvers.size() != 1) {
    throw UsageError("cluster-convex takes a single solver");
  }
  if (c == "cluster-convex" || c == "cluster-lowrank") {
    if (!(cfg.p_out < cfg.p_in)) throw UsageError("p-out must be below p-in");
    if (cfg.input.empty() && cfg.k > cfg.n.front()) throw UsageError("k must not exceed n");
  }
  if (c == "cluster-lowrank") {
    for (const auto& m : cfg.manifolds)
      if (m == "ds") throw UsageError("manifold: cluster-lowrank runs on sym and psd only");
    for (const auto& s : cfg.solvers)
      if (s != "gd" && s != "cg") throw UsageError("solver: cluster-lowrank is first order only");
  }
}

}  // namespace birkhoff::cli
