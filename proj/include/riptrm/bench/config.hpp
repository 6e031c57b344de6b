#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riptrm/bench/feasibility.hpp"
#include "riptrm/bench/problems.hpp"
#include "riptrm/solver.hpp"

namespace riptrm::bench {

enum class SecondOrderMode { kAuto, kOn, kOff };

std::string to_string(SecondOrderMode m);
SecondOrderMode parse_second_order(const std::string& s);

/// Every setting of a `run`/`verify` invocation. Keys accepted by
/// apply_setting are listed in config_keys().
struct RunConfig {
  ProblemKind problem = ProblemKind::kAnalytic1d;
  trs::Subsolver subsolver = trs::Subsolver::kTruncatedCg;
  SecondOrderMode second_order = SecondOrderMode::kAuto;
  double budget_s = 240.0;
  int max_outer = 1000;
  double target_residual = 1e-9;
  std::uint64_t seed = 0;
  std::string out;
  std::string plot_script;
  int repeat = 1;
  bool deterministic = false;

  double mu0 = 0.1;
  double mu_factor = 0.5;
  double mu_exponent = 1.01;
  double mu_min = 1e-30;
  std::optional<double> delta_hat0;
  std::optional<double> manifold_scale;
  double delta_bar = 1e-15;
  double active_tol = kDefaultActiveTol;

  InnerConfig inner;
  RosenbrockGrassmannSpec rosenbrock;
  StableLinSysSpec linsys;
  FeasibilityOptions feasibility;

  /// Whether the second-order stopping clause is in force.
  bool second_order_enabled() const;
  /// Solver configuration derived from these settings.
  OuterConfig outer_config() const;
  /// Throws InvalidInput on an inconsistent combination.
  void validate() const;
};

/// Recognized keys with a one-line description each.
const std::map<std::string, std::string>& config_keys();

/// Sets one key. Throws InvalidInput on an unknown key or unparsable value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; `#` starts a comment. Throws InvalidInput on a
/// malformed line (with its number) and IoError when the file is unreadable.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Settings as `key = value` text that parse_config_text reads back.
std::string dump_config(const RunConfig& cfg);

}  // namespace riptrm::bench
