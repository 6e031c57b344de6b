#include "riptrm/bench/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "riptrm/error.hpp"

namespace riptrm::bench {

namespace {

constexpr char kSep = ',';
constexpr char kVecSep = ';';

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += kVecSep;
    out += format_double(v(i));
  }
  return out;
}

double parse_double(const std::string& s, const std::string& column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InvalidInput("trace: column '" + column + "' has a malformed number '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& column) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("trace: column '" + column + "' has a malformed integer '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s, const std::string& column) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw InvalidInput("trace: column '" + column + "' expects 0 or 1, got '" + s + "'");
}

Eigen::VectorXd parse_vector(const std::string& s, const std::string& column) {
  std::vector<double> vals;
  if (!s.empty()) {
    std::size_t start = 0;
    while (true) {
      const std::size_t end = s.find(kVecSep, start);
      vals.push_back(parse_double(s.substr(start, end - start), column));
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(kSep, start);
    out.push_back(line.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

bool same_bits(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!same_bits(a(i), b(i))) return false;
  }
  return true;
}

}  // namespace

bool RunRecord::operator==(const RunRecord& o) const {
  return outer_iter == o.outer_iter && inner_iter == o.inner_iter &&
         same_bits(elapsed_s, o.elapsed_s) && same_bits(mu, o.mu) && same_bits(delta, o.delta) &&
         same_bits(f, o.f) && same_bits(merit, o.merit) &&
         same_bits(residual_total, o.residual_total) &&
         same_bits(grad_lag_norm, o.grad_lag_norm) && same_bits(compl_norm, o.compl_norm) &&
         same_bits(min_eig_H, o.min_eig_H) &&
         same_bits(second_order_measure, o.second_order_measure) && accepted == o.accepted &&
         status == o.status && same_bits(delta_next, o.delta_next) && same_bits(ared, o.ared) &&
         same_bits(pred, o.pred) && same_bits(d_norm, o.d_norm) &&
         feasible_retraction == o.feasible_retraction && same_bits(min_g, o.min_g) &&
         same_bits(min_lambda, o.min_lambda) && same_vector(lambda_prev, o.lambda_prev) &&
         same_vector(dual_raw, o.dual_raw) && same_vector(dual_clipped, o.dual_clipped) &&
         same_vector(g_new, o.g_new) && same_vector(x, o.x) && same_vector(lambda, o.lambda);
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "outer_iter",    "inner_iter", "elapsed_s",    "mu",
      "delta",         "f",          "merit",        "residual_total",
      "grad_lag_norm", "compl_norm", "min_eig_H",    "second_order_measure",
      "accepted",      "status",     "delta_next",   "ared",
      "pred",          "d_norm",     "feasible_retraction", "min_g",
      "min_lambda",    "lambda_prev", "dual_raw",    "dual_clipped",
      "g_new",         "x",          "lambda"};
  return cols;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) {
    if (!out.empty()) out += kSep;
    out += c;
  }
  return out;
}

std::string to_csv_row(const RunRecord& r) {
  if (r.status.find_first_of(",\n\r") != std::string::npos) {
    throw InvalidInput("trace: status must not contain separators");
  }
  const std::vector<std::string> fields = {
      std::to_string(r.outer_iter),
      std::to_string(r.inner_iter),
      format_double(r.elapsed_s),
      format_double(r.mu),
      format_double(r.delta),
      format_double(r.f),
      format_double(r.merit),
      format_double(r.residual_total),
      format_double(r.grad_lag_norm),
      format_double(r.compl_norm),
      format_double(r.min_eig_H),
      format_double(r.second_order_measure),
      r.accepted ? "1" : "0",
      r.status,
      format_double(r.delta_next),
      format_double(r.ared),
      format_double(r.pred),
      format_double(r.d_norm),
      r.feasible_retraction ? "1" : "0",
      format_double(r.min_g),
      format_double(r.min_lambda),
      format_vector(r.lambda_prev),
      format_vector(r.dual_raw),
      format_vector(r.dual_clipped),
      format_vector(r.g_new),
      format_vector(r.x),
      format_vector(r.lambda)};
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += kSep;
    out += fields[i];
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << csv_header() << '\n';
  for (const auto& r : records) os << to_csv_row(r) << '\n';
}

void write_csv_file(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_csv(os, records);
  os.flush();
  if (!os) throw IoError("failed writing '" + path + "'");
}

RunRecord parse_csv_row(const std::string& line) {
  const auto& cols = csv_columns();
  const std::vector<std::string> f = split(line);
  if (f.size() != cols.size()) {
    throw InvalidInput("trace: expected " + std::to_string(cols.size()) + " fields, got " +
                       std::to_string(f.size()));
  }
  RunRecord r;
  std::size_t i = 0;
  auto next = [&]() -> const std::string& { return f[i++]; };
  auto col = [&]() -> const std::string& { return cols[i]; };
  r.outer_iter = parse_int(f[i], col()), ++i;
  r.inner_iter = parse_int(f[i], col()), ++i;
  for (double* d : {&r.elapsed_s, &r.mu, &r.delta, &r.f, &r.merit, &r.residual_total,
                    &r.grad_lag_norm, &r.compl_norm, &r.min_eig_H, &r.second_order_measure}) {
    *d = parse_double(f[i], col()), ++i;
  }
  r.accepted = parse_bool(f[i], col()), ++i;
  r.status = next();
  for (double* d : {&r.delta_next, &r.ared, &r.pred, &r.d_norm}) {
    *d = parse_double(f[i], col()), ++i;
  }
  r.feasible_retraction = parse_bool(f[i], col()), ++i;
  for (double* d : {&r.min_g, &r.min_lambda}) {
    *d = parse_double(f[i], col()), ++i;
  }
  for (Eigen::VectorXd* v :
       {&r.lambda_prev, &r.dual_raw, &r.dual_clipped, &r.g_new, &r.x, &r.lambda}) {
    *v = parse_vector(f[i], col()), ++i;
  }
  return r;
}

std::vector<RunRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("trace: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw InvalidInput("trace: unexpected header");
  std::vector<RunRecord> out;
  int row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      out.push_back(parse_csv_row(line));
    } catch (const InvalidInput& e) {
      throw InvalidInput("row " + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RunRecord> read_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_csv(is);
}

std::string plot_script(const std::string& csv_path, const std::string& title) {
  std::ostringstream os;
  os << "# gnuplot script; run with: gnuplot -p <this file>\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set multiplot layout 2,1 title '" << title << "'\n"
     << "set xlabel 'elapsed time [s]'\n"
     << "set ylabel 'residual'\n"
     << "set logscale y\n"
     << "set format y '10^{%L}'\n"
     << "plot '" << csv_path << "' using 3:8 with linespoints title 'residual'\n"
     << "unset logscale y\n"
     << "set format y '%g'\n"
     << "set ylabel 'atan(second-order measure)'\n"
     << "set yrange [-pi/2:pi/2]\n"
     << "plot '" << csv_path
     << "' using 3:(atan(column(12))) with linespoints title 'atan(min eig)'\n"
     << "unset multiplot\n";
  return os.str();
}

}  // namespace riptrm::bench
