#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace riptrm::bench {

/// One CSV row. Inner rows describe the iterate carried forward after inner
/// iteration `inner_iter`; rows with inner_iter = -1 are the initial point
/// ("initial"), outer summaries ("outer:<inner status>") and the final point
/// ("final:<outer status>").
struct RunRecord {
  int outer_iter = 0;
  int inner_iter = -1;
  double elapsed_s = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  double f = 0.0;
  double merit = 0.0;
  double residual_total = 0.0;
  double grad_lag_norm = 0.0;
  double compl_norm = 0.0;
  double min_eig_H = 0.0;
  double second_order_measure = 0.0;
  bool accepted = false;
  std::string status;

  double delta_next = 0.0;
  double ared = 0.0;
  double pred = 0.0;
  double d_norm = 0.0;
  bool feasible_retraction = false;
  double min_g = 0.0;
  double min_lambda = 0.0;
  Eigen::VectorXd lambda_prev;
  Eigen::VectorXd dual_raw;
  Eigen::VectorXd dual_clipped;
  Eigen::VectorXd g_new;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;

  bool is_inner() const { return inner_iter >= 0; }
  bool operator==(const RunRecord& other) const;
};

/// Column names in emission order; the first fourteen are the fixed core.
const std::vector<std::string>& csv_columns();

std::string csv_header();
std::string to_csv_row(const RunRecord& r);
void write_csv(std::ostream& os, const std::vector<RunRecord>& records);
void write_csv_file(const std::string& path, const std::vector<RunRecord>& records);

/// Throws InvalidInput on a malformed row or header.
RunRecord parse_csv_row(const std::string& line);
std::vector<RunRecord> read_csv(std::istream& is);
/// Throws IoError when the file cannot be opened.
std::vector<RunRecord> read_csv_file(const std::string& path);

/// Gnuplot script plotting residual against time and the arctangent-scaled
/// second-order measure from `csv_path`.
std::string plot_script(const std::string& csv_path, const std::string& title);

}  // namespace riptrm::bench
