#include "riptrm/bench/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "riptrm/error.hpp"

namespace riptrm::bench {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw InvalidInput("config: '" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw InvalidInput("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw InvalidInput("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

struct KeySpec {
  std::string help;
  Setter set;
  std::function<std::string(const RunConfig&)> get;
};

#define RIPTRM_DOUBLE(field)                                                                   \
  [](RunConfig& c, const std::string& k, const std::string& v) { c.field = to_double(k, v); }, \
      [](const RunConfig& c) { return fmt(c.field); }
#define RIPTRM_INT(field)                                                              \
  [](RunConfig& c, const std::string& k, const std::string& v) {                       \
    c.field = to_integer<decltype(c.field)>(k, v);                                     \
  },                                                                                   \
      [](const RunConfig& c) { return std::to_string(c.field); }
#define RIPTRM_OPT_DOUBLE(field)                                                                \
  [](RunConfig& c, const std::string& k, const std::string& v) {                                \
    if (v == "default") {                                                                       \
      c.field.reset();                                                                          \
    } else {                                                                                    \
      c.field = to_double(k, v);                                                                \
    }                                                                                           \
  },                                                                                            \
      [](const RunConfig& c) { return c.field ? fmt(*c.field) : std::string("default"); }

const std::map<std::string, KeySpec>& registry() {
  static const std::map<std::string, KeySpec> reg = {
      {"problem",
       {"rosenbrock-grassmann | stable-linsys | analytic-1d",
        [](RunConfig& c, const std::string&, const std::string& v) {
          c.problem = parse_problem_kind(v);
        },
        [](const RunConfig& c) { return to_string(c.problem); }}},
      {"subsolver",
       {"cauchy | tcg | exact",
        [](RunConfig& c, const std::string&, const std::string& v) {
          c.subsolver = trs::parse_subsolver(v);
        },
        [](const RunConfig& c) { return trs::to_string(c.subsolver); }}},
      {"second_order",
       {"auto | on | off (auto: on iff subsolver = exact)",
        [](RunConfig& c, const std::string&, const std::string& v) {
          c.second_order = parse_second_order(v);
        },
        [](const RunConfig& c) { return to_string(c.second_order); }}},
      {"budget_s", {"wall-clock budget in seconds", RIPTRM_DOUBLE(budget_s)}},
      {"max_outer", {"maximum number of outer iterations", RIPTRM_INT(max_outer)}},
      {"target_residual", {"stop once the KKT residual is at most this", RIPTRM_DOUBLE(target_residual)}},
      {"seed", {"seed for data generation and the feasibility phase", RIPTRM_INT(seed)}},
      {"out",
       {"CSV trace path",
        [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; },
        [](const RunConfig& c) { return c.out; }}},
      {"plot_script",
       {"gnuplot script path",
        [](RunConfig& c, const std::string&, const std::string& v) { c.plot_script = v; },
        [](const RunConfig& c) { return c.plot_script; }}},
      {"repeat", {"number of runs with seeds seed, seed+1, ...", RIPTRM_INT(repeat)}},
      {"deterministic",
       {"write elapsed_s = 0 so traces are reproducible bit for bit",
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.deterministic = to_bool(k, v);
        },
        [](const RunConfig& c) { return std::string(c.deterministic ? "true" : "false"); }}},
      {"mu0", {"initial barrier parameter", RIPTRM_DOUBLE(mu0)}},
      {"mu_factor", {"schedule mu <- mu_factor * mu^mu_exponent", RIPTRM_DOUBLE(mu_factor)}},
      {"mu_exponent", {"schedule exponent", RIPTRM_DOUBLE(mu_exponent)}},
      {"mu_min", {"stop when mu falls below this", RIPTRM_DOUBLE(mu_min)}},
      {"delta_hat0", {"initial radius or 'default' (scale / 8)", RIPTRM_OPT_DOUBLE(delta_hat0)}},
      {"manifold_scale", {"manifold scale s or 'default'", RIPTRM_OPT_DOUBLE(manifold_scale)}},
      {"delta_bar", {"minimum initial radius of an inner solve", RIPTRM_DOUBLE(delta_bar)}},
      {"active_tol", {"activity threshold of the second-order measure", RIPTRM_DOUBLE(active_tol)}},
      {"eta", {"acceptance threshold in (0, 1/4)", RIPTRM_DOUBLE(inner.eta)}},
      {"contract_coeff", {"radius factor after an infeasible retraction", RIPTRM_DOUBLE(inner.contract_coeff)}},
      {"delta_max", {"maximal trust-region radius", RIPTRM_DOUBLE(inner.delta_max)}},
      {"clip_c_lo", {"lower clipping constant in (0, 1)", RIPTRM_DOUBLE(inner.clip_c_lo)}},
      {"clip_c_hi", {"upper clipping constant > 1", RIPTRM_DOUBLE(inner.clip_c_hi)}},
      {"min_radius", {"inner solve stalls below this radius", RIPTRM_DOUBLE(inner.min_radius)}},
      {"pred_noise", {"stall once pred <= pred_noise * eps * |merit|", RIPTRM_DOUBLE(inner.pred_noise)}},
      {"max_inner_iters", {"inner iteration cap per barrier value", RIPTRM_INT(inner.max_inner_iters)}},
      {"tcg.kappa", {"truncated CG linear convergence factor", RIPTRM_DOUBLE(inner.tcg.kappa)}},
      {"tcg.theta", {"truncated CG superlinear exponent", RIPTRM_DOUBLE(inner.tcg.theta)}},
      {"tcg.max_iter", {"truncated CG iteration cap (0 = dimension)", RIPTRM_INT(inner.tcg.max_iter)}},
      {"exact.tol", {"exact-step verification tolerance", RIPTRM_DOUBLE(inner.exact_tol)}},
      {"rosenbrock.n", {"ambient rows of the Grassmann factor", RIPTRM_INT(rosenbrock.n)}},
      {"rosenbrock.k", {"subspace dimension", RIPTRM_INT(rosenbrock.k)}},
      {"rosenbrock.alpha", {"coupling weight", RIPTRM_DOUBLE(rosenbrock.alpha)}},
      {"rosenbrock.c", {"entrywise lower bound", RIPTRM_DOUBLE(rosenbrock.c)}},
      {"linsys.n", {"state dimension", RIPTRM_INT(linsys.n)}},
      {"linsys.h", {"sampling interval", RIPTRM_DOUBLE(linsys.h)}},
      {"linsys.N", {"number of observations", RIPTRM_INT(linsys.N)}},
      {"linsys.frac1", {"|I1| = floor(frac1 n^2)", RIPTRM_DOUBLE(linsys.frac1)}},
      {"linsys.frac2", {"|I2| = floor(frac2 n^2)", RIPTRM_DOUBLE(linsys.frac2)}},
      {"linsys.noise_sigma", {"observation noise standard deviation", RIPTRM_DOUBLE(linsys.noise_sigma)}},
      {"linsys.ring_radius", {"ring radius r", RIPTRM_DOUBLE(linsys.ring_radius)}},
      {"linsys.bound_margin", {"gap between the true entries and the box", RIPTRM_DOUBLE(linsys.bound_margin)}},
      {"feasibility.tol", {"required min g of the start point", RIPTRM_DOUBLE(feasibility.tol)}},
      {"feasibility.max_restarts", {"random restarts of the feasibility phase", RIPTRM_INT(feasibility.max_restarts)}},
      {"feasibility.max_iters", {"gradient steps per restart", RIPTRM_INT(feasibility.max_iters)}},
  };
  return reg;
}

#undef RIPTRM_DOUBLE
#undef RIPTRM_INT
#undef RIPTRM_OPT_DOUBLE

}  // namespace

std::string to_string(SecondOrderMode m) {
  switch (m) {
    case SecondOrderMode::kAuto:
      return "auto";
    case SecondOrderMode::kOn:
      return "on";
    case SecondOrderMode::kOff:
      return "off";
  }
  return "auto";
}

SecondOrderMode parse_second_order(const std::string& s) {
  if (s == "auto") return SecondOrderMode::kAuto;
  if (s == "on") return SecondOrderMode::kOn;
  if (s == "off") return SecondOrderMode::kOff;
  throw InvalidInput("second_order must be auto, on or off (got '" + s + "')");
}

bool RunConfig::second_order_enabled() const {
  switch (second_order) {
    case SecondOrderMode::kOn:
      return true;
    case SecondOrderMode::kOff:
      return false;
    case SecondOrderMode::kAuto:
      break;
  }
  return subsolver == trs::Subsolver::kExact;
}

OuterConfig RunConfig::outer_config() const {
  OuterConfig oc;
  oc.mu0 = mu0;
  const double factor = mu_factor;
  const double exponent = mu_exponent;
  oc.mu_update = [factor, exponent](double mu) { return factor * std::pow(mu, exponent); };
  oc.mu_min = mu_min;
  oc.delta_bar = delta_bar;
  if (delta_hat0) {
    oc.delta_hat0 = delta_hat0;
  } else if (manifold_scale) {
    oc.delta_hat0 = std::min(*manifold_scale / 8.0, inner.delta_max);
  }
  oc.stopping.second_order = second_order_enabled();
  oc.inner = inner;
  oc.inner.subsolver = subsolver;
  oc.budget_s = budget_s;
  oc.max_outer = max_outer;
  oc.target_residual = target_residual;
  return oc;
}

void RunConfig::validate() const {
  if (!(budget_s > 0.0)) throw InvalidInput("budget_s must be positive");
  if (max_outer < 1) throw InvalidInput("max_outer must be at least 1");
  if (!(target_residual >= 0.0)) throw InvalidInput("target_residual must be nonnegative");
  if (repeat < 1) throw InvalidInput("repeat must be at least 1");
  if (!(mu_factor > 0.0 && mu_factor < 1.0 && mu_exponent >= 1.0)) {
    throw InvalidInput("barrier schedule needs 0 < mu_factor < 1 and mu_exponent >= 1");
  }
  if (!(mu_min > 0.0)) throw InvalidInput("mu_min must be positive");
  if (manifold_scale && !(*manifold_scale > 0.0)) {
    throw InvalidInput("manifold_scale must be positive");
  }
  if (!(active_tol > 0.0)) throw InvalidInput("active_tol must be positive");
  outer_config().validate();
  rosenbrock.validate();
  linsys.validate();
}

const std::map<std::string, std::string>& config_keys() {
  static const std::map<std::string, std::string> keys = [] {
    std::map<std::string, std::string> out;
    for (const auto& [k, spec] : registry()) out.emplace(k, spec.help);
    return out;
  }();
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = registry().find(key);
  if (it == registry().end()) throw InvalidInput("config: unknown key '" + key + "'");
  it->second.set(cfg, key, value);
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw InvalidInput("config line " + std::to_string(number) + ": empty key");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [key, spec] : registry()) {
    const std::string value = spec.get(cfg);
    if (value.empty()) continue;
    os << key << " = " << value << '\n';
  }
  return os.str();
}

}  // namespace riptrm::bench
