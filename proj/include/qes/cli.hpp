#pragma once

#include "qes/variational.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qes::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kNumericalFailure = 3,
  kVerificationFailure = 4,
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { Table, Object };

struct RunConfig {
  std::string command;
  double s = 0.0;
  std::optional<double> gamma;  ///< when set, s = |gamma|
  double b = 1.0;
  double d = 0.0;
  int n0 = 1;
  int n_min = 0;
  int n_max = 6;
  double a_min = -5.0;
  double a_max = 5.0;
  double a_step = 0.05;
  int nu_max = 6;
  int basis_size = 25;
  double drop_tol = kDefaultDropTol;
  double match_tol = 1e-5;
  double im_tol = 1e-9;
  double fd_delta = 1e-5;
  /// Added to every truncation energy inside the residual checks of verify.
  double perturb_w = 0.0;
  std::string out;
  OutputFormat format = OutputFormat::Table;

  [[nodiscard]] double effective_s() const { return gamma ? std::abs(*gamma) : s; }
  /// Throws UsageError.
  void validate() const;
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Locale-independent parsing; throws UsageError naming the flag.
double parse_double(const std::string& text, const std::string& flag);
int parse_int(const std::string& text, const std::string& flag);
OutputFormat parse_format(const std::string& text);

/// Shortest text of v with 17 significant digits, locale independent.
std::string format_double(double v);

using Cell = std::variant<long long, double, std::string, std::vector<double>>;

struct Table {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Tab-separated table preceded by "# key=value" config lines, or a JSON
/// object {"config", "columns", "rows"}.
void write_table(std::ostream& os, const Table& t, OutputFormat fmt);

Table cmd_truncate(const RunConfig& cfg);
Table cmd_heun_roots(const RunConfig& cfg);
Table cmd_curves(const RunConfig& cfg);

struct FigureDataset {
  Table curves;
  Table points;
  std::vector<PointAssignment> assignments;
  /// Grid columns (index into the a-grid) holding two points of the same n.
  std::vector<long long> crowded_columns;
  /// Grid columns holding points of different n; informational only.
  std::vector<long long> shared_columns;
  /// Pairs of points whose a_root agree to 1e-9 relative.
  std::size_t coincident_roots = 0;
  std::string metadata_json;
};

/// Grid columns, round((a - a_min) / step), that contain more than one
/// in-range point; with per_family, only points sharing n are counted together.
std::vector<long long> vertical_line_violations(const std::vector<PointAssignment>& points, double a_min,
                                                double step, bool per_family = true);

/// Number of adjacent pairs in the sorted a_root list closer than rel_tol * max(1, |a|).
std::size_t coincident_roots(const std::vector<PointAssignment>& points, double rel_tol);

FigureDataset cmd_figure(const RunConfig& cfg);

/// Writes curves.<ext>, points.<ext> and metadata.json into dir.
void write_figure(const FigureDataset& fig, const std::filesystem::path& dir, OutputFormat fmt);

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double allowed = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  [[nodiscard]] bool all_pass() const;
};

VerifyReport cmd_verify(const RunConfig& cfg);
void write_verify(std::ostream& os, const VerifyReport& r, const RunConfig& cfg);

/// Full front end: parses argv, runs, writes, maps failures to ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qes::cli
