#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "horizon/problem.hpp"

namespace horizon::cli {

enum class Format { csv, json };

struct RunConfig {
  BuiltinExample example = BuiltinExample::oscillator;
  ParamMap params;       // merged with the example defaults
  double t_max = 0.0;    // 0 selects the example default
  int grid = 0;          // 0 selects the command default
  double tol = 1e-6;
  std::string out;       // empty writes to stdout
  Format format = Format::csv;

  // needle
  double tau = -1.0;     // negative selects the example default
  double u = std::numeric_limits<double>::quiet_NaN();
  double horizon = 0.0;

  // phase diagram ranges (lower ends excluded)
  double k_lo = 0.0, k_hi = 160.0;
  double c_lo = 0.0, c_hi = 8.0;

  /// Throws std::invalid_argument on nonpositive numeric fields.
  void validate() const;
  [[nodiscard]] double effective_t_max() const;
  /// Example defaults overlaid with the user's parameters.
  [[nodiscard]] ParamMap effective_params() const;
};

using Cell = std::variant<std::string, double, long long>;

struct ReportTable {
  std::string schema;
  std::vector<std::string> columns;  // excluding the leading schema column
  std::vector<std::vector<Cell>> rows;
};

/// 9 significant digits, locale independent; nan/inf spelled out.
std::string format_number(double x);

std::string to_csv(const ReportTable& table);
std::string to_json(const ReportTable& table);

ReportTable cmd_check(const RunConfig& config);
ReportTable cmd_phase_diagram(const RunConfig& config);
ReportTable cmd_overtake(const RunConfig& config);
ReportTable cmd_needle(const RunConfig& config);
ReportTable cmd_list_examples();

/// Full command line; returns 0 on completion, 2 on configuration errors and
/// 3 on integration failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace horizon::cli
