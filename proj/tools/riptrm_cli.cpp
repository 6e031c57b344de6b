#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "riptrm/bench/config.hpp"
#include "riptrm/bench/diagnostics.hpp"
#include "riptrm/bench/runner.hpp"
#include "riptrm/bench/trace.hpp"
#include "riptrm/error.hpp"

namespace {

using namespace riptrm;
using namespace riptrm::bench;

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("riptrm");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  const char* env = std::getenv("RIPTRM_LOG");
  const std::string level = env ? env : "warn";
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") {
    spdlog::set_level(spdlog::level::warn);
    spdlog::warn("RIPTRM_LOG='{}' is not a log level; using warn", level);
  } else {
    spdlog::set_level(parsed);
  }
}

/// Flags shared by run, verify and gradcheck. Every flag maps onto a config
/// key and overrides the config file.
struct CommonFlags {
  std::optional<std::string> config_path;
  std::deque<std::pair<std::string, std::optional<std::string>>> flags;
  std::vector<std::string> sets;

  std::optional<std::string>& slot(const std::string& key) {
    flags.emplace_back(key, std::nullopt);
    return flags.back().second;
  }

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "Config file of 'key = value' lines");
    app.add_option("--problem", slot("problem"),
                   "rosenbrock-grassmann | stable-linsys | analytic-1d");
    app.add_option("--subsolver", slot("subsolver"), "cauchy | tcg | exact");
    app.add_option("--second-order", slot("second_order"), "auto | on | off");
    app.add_option("--budget-s", slot("budget_s"), "Wall-clock budget in seconds");
    app.add_option("--max-outer", slot("max_outer"), "Maximum outer iterations");
    app.add_option("--target-residual", slot("target_residual"), "Terminal KKT residual");
    app.add_option("--seed", slot("seed"), "Seed for data and the feasibility phase");
    app.add_option("--set", sets, "Extra config override KEY=VALUE (repeatable)");
  }

  RunConfig build() const {
    RunConfig cfg;
    if (config_path) {
      for (const auto& [k, v] : read_config_file(*config_path)) apply_setting(cfg, k, v);
    }
    for (const auto& [k, v] : flags) {
      if (v) apply_setting(cfg, k, *v);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InvalidInput("--set expects KEY=VALUE, got '" + s + "'");
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

void print_summary(std::ostream& os, const RunConfig& cfg, const RunResult& r) {
  std::size_t inner = r.solver.inner.size();
  os << "problem:          " << to_string(cfg.problem) << '\n'
     << "subsolver:        " << trs::to_string(cfg.subsolver) << '\n'
     << "second order:     " << (cfg.second_order_enabled() ? "on" : "off") << '\n'
     << "seed:             " << cfg.seed << '\n'
     << "status:           " << to_string(r.solver.status) << '\n'
     << "outer iterations: " << r.solver.outer.size() << '\n'
     << "inner iterations: " << inner << '\n'
     << "final residual:   " << r.final_residual.total << '\n'
     << "second-order:     " << r.final_second_order << '\n'
     << "wall time [s]:    " << r.wall_s << '\n';
}

int run_one(const RunConfig& cfg, std::ostream& os) {
  const RunResult res = run_solver(cfg);
  if (!cfg.out.empty()) write_csv_file(cfg.out, res.records);
  if (!cfg.plot_script.empty()) {
    std::ofstream ps(cfg.plot_script);
    if (!ps) throw IoError("cannot open '" + cfg.plot_script + "' for writing");
    ps << plot_script(cfg.out.empty() ? "trace.csv" : cfg.out,
                      to_string(cfg.problem) + " / " + trs::to_string(cfg.subsolver));
  }
  print_summary(os, cfg, res);
  return kExitOk;
}

int classify(const std::exception& e) {
  if (dynamic_cast<const InvalidInput*>(&e) || dynamic_cast<const IoError*>(&e)) {
    return kExitUsage;
  }
  return kExitSolver;
}

int cmd_run(const CommonFlags& common, const std::optional<std::string>& out,
            const std::optional<std::string>& plot, const std::optional<int>& repeat,
            bool deterministic) {
  RunConfig cfg = common.build();
  if (out) cfg.out = *out;
  if (plot) cfg.plot_script = *plot;
  if (repeat) cfg.repeat = *repeat;
  if (deterministic) cfg.deterministic = true;
  cfg.validate();

  if (cfg.repeat == 1) return run_one(cfg, std::cout);

  std::vector<RunConfig> runs;
  for (int r = 0; r < cfg.repeat; ++r) {
    RunConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(r);
    c.out = repeat_path(cfg.out, r);
    c.plot_script = repeat_path(cfg.plot_script, r);
    runs.push_back(std::move(c));
  }
  std::vector<std::string> reports(runs.size());
  std::vector<int> codes(runs.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      std::ostringstream os;
      try {
        codes[i] = run_one(runs[i], os);
      } catch (const std::exception& e) {
        os << "error: " << e.what() << '\n';
        codes[i] = classify(e);
      }
      reports[i] = os.str();
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min<std::size_t>(hw, runs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::cout << "== run " << i << " ==\n" << reports[i];
  }
  return *std::max_element(codes.begin(), codes.end());
}

int cmd_verify(const CommonFlags& common, const std::string& trace) {
  const RunConfig cfg = common.build();
  const std::vector<RunRecord> rows = read_csv_file(trace);
  const RicoProblem p = make_problem(cfg);
  const VerifyReport rep = verify_trace(cfg, p, rows);
  std::cout << "rows:             " << rows.size() << '\n'
            << "final residual:   " << rep.final_residual << '\n'
            << "second-order:     " << rep.final_second_order << '\n';
  for (const auto& issue : rep.issues) {
    std::cout << "violation (row " << issue.row << "): " << issue.message << '\n';
  }
  std::cout << (rep.ok() ? "verify: ok" : "verify: FAILED") << '\n';
  return rep.ok() ? kExitOk : kExitSolver;
}

int cmd_gradcheck(const CommonFlags& common, bool all, int points) {
  const RunConfig base = common.build();
  std::vector<ProblemKind> kinds{base.problem};
  if (all) {
    kinds = {ProblemKind::kAnalytic1d, ProblemKind::kRosenbrockGrassmann,
             ProblemKind::kStableLinsys};
  }
  bool ok = true;
  for (const ProblemKind kind : kinds) {
    RunConfig cfg = base;
    cfg.problem = kind;
    const RicoProblem p = make_problem(cfg);
    for (int k = 0; k < points; ++k) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
      const ManifoldPoint x = p.manifold->sample_point(seed);
      for (const auto& c : gradcheck(p, x, seed + 17)) {
        ok = ok && c.pass;
        std::cout << to_string(kind) << " point " << k << " " << c.oracle
                  << ": grad_err=" << c.grad_rel_err << " hess_err=" << c.hess_rel_err
                  << " grad_slope=" << (c.grad_exact ? std::string("exact")
                                                       : std::to_string(c.grad_slope))
                  << " hess_slope=" << (c.hess_exact ? std::string("exact")
                                                       : std::to_string(c.hess_slope))
                  << (c.pass ? " ok" : " FAIL") << '\n';
      }
    }
  }
  std::cout << (ok ? "gradcheck: ok" : "gradcheck: FAILED") << '\n';
  return ok ? kExitOk : kExitSolver;
}

int cmd_trs_bench(const TrsBenchOptions& opts, const std::optional<std::string>& out) {
  const std::vector<TrsBenchRow> rows = trs_bench(opts);
  int failures = 0;
  int hard = 0;
  for (const auto& r : rows) {
    if (!r.pass) {
      ++failures;
      std::cout << "instance " << r.index << " (dim " << r.dim << (r.hard_case ? ", hard" : "")
                << "): " << r.note << '\n';
    }
    hard += r.hard_case ? 1 : 0;
  }
  if (out) {
    std::ofstream os(*out);
    if (!os) throw IoError("cannot open '" + *out + "' for writing");
    os << "index,dim,hard_case,radius,model_cauchy,model_tcg,model_exact,cauchy_bound,"
          "exact_verified,pass\n";
    os.precision(17);
    for (const auto& r : rows) {
      os << r.index << ',' << r.dim << ',' << r.hard_case << ',' << r.radius << ','
         << r.model_cauchy << ',' << r.model_tcg << ',' << r.model_exact << ','
         << r.cauchy_bound << ',' << r.exact_verified << ',' << r.pass << '\n';
    }
  }
  std::cout << "instances: " << rows.size() << " (hard case: " << hard << ")\n"
            << "failures:  " << failures << '\n';
  return failures == 0 ? kExitOk : kExitSolver;
}

std::string config_help() {
  std::string out = "Config keys (file: 'key = value', '#' comments):\n";
  for (const auto& [k, help] : config_keys()) out += "  " + k + ": " + help + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Riemannian interior point trust region solver"};
  app.require_subcommand(1);
  app.footer(config_help());

  CommonFlags run_flags;
  std::optional<std::string> out;
  std::optional<std::string> plot;
  std::optional<int> repeat;
  bool deterministic = false;
  CLI::App* run = app.add_subcommand("run", "Solve a built-in problem and write a CSV trace");
  run_flags.attach(*run);
  run->add_option("--out", out, "CSV trace path");
  run->add_option("--plot-script", plot, "Write a gnuplot script for the trace");
  run->add_option("--repeat", repeat, "Run K times with seeds seed..seed+K-1 in parallel");
  run->add_flag("--deterministic", deterministic, "Write elapsed_s = 0 for reproducible traces");

  CommonFlags verify_flags;
  std::string trace;
  CLI::App* verify = app.add_subcommand("verify", "Check a trace against the problem");
  verify_flags.attach(*verify);
  verify->add_option("--trace,trace", trace, "CSV trace to check")->required();

  CommonFlags grad_flags;
  bool all = false;
  int points = 3;
  CLI::App* grad = app.add_subcommand("gradcheck", "Finite-difference checks of the oracles");
  grad_flags.attach(*grad);
  grad->add_flag("--all", all, "Check every built-in problem");
  grad->add_option("--points", points, "Random points per problem")->check(CLI::PositiveNumber);

  TrsBenchOptions bench_opts;
  std::optional<std::string> bench_out;
  CLI::App* bench = app.add_subcommand("trs-bench", "Random trust-region subproblems");
  bench->add_option("--count", bench_opts.count, "Number of instances")->check(CLI::NonNegativeNumber);
  bench->add_option("--max-dim", bench_opts.max_dim, "Largest dimension")->check(CLI::PositiveNumber);
  bench->add_option("--hard-fraction", bench_opts.hard_fraction, "Fraction of hard-case instances")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--tol", bench_opts.tol, "Verification tolerance");
  bench->add_option("--seed", bench_opts.seed, "Seed");
  bench->add_option("--out", bench_out, "Per-instance CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_flags, out, plot, repeat, deterministic);
    if (*verify) return cmd_verify(verify_flags, trace);
    if (*grad) return cmd_gradcheck(grad_flags, all, points);
    if (*bench) return cmd_trs_bench(bench_opts, bench_out);
  } catch (const std::exception& e) {
    const int code = classify(e);
    std::cerr << "error: " << e.what() << '\n';
    return code;
  }
  return kExitUsage;
}
