#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace horizon {

enum class Status { holds, fails, inconclusive };

std::string to_string(Status s);

/// Outcome of a numerical condition check plus the series that backs it.
struct ConditionVerdict {
  Status status = Status::inconclusive;
  std::vector<std::pair<double, double>> diagnostic_series;
  double tolerance_used = 0.0;
  std::string note;

  [[nodiscard]] bool holds() const { return status == Status::holds; }
  [[nodiscard]] bool fails() const { return status == Status::fails; }
};

/// How tail limits are judged.
struct TailPolicy {
  double window_fraction = 0.25;  // trailing share of the time range
  double converge_tol = 1e-4;     // oscillation / mean threshold for "holds"
  double fail_tol = 1e-2;         // oscillation / mean threshold for "fails"
};

struct TailStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  [[nodiscard]] double oscillation() const { return max - min; }
};

/// Statistics of `values` over samples whose time lies in the trailing window.
TailStats tail_stats(std::span<const double> times, std::span<const double> values, double window_start);

/// Three-way verdict for "series -> 0": holds when the tail oscillation and
/// |mean| are both below converge_tol, fails when either reaches fail_tol.
ConditionVerdict limit_is_zero(std::span<const double> times, std::span<const double> values,
                               const TailPolicy& policy);

/// `count` points from lo to hi with geometric spacing of (t - origin).
std::vector<double> geometric_grid(double origin, double lo, double hi, int count);
/// `count` equally spaced points from lo to hi inclusive.
std::vector<double> uniform_grid(double lo, double hi, int count);
/// Equally spaced points from lo to hi inclusive with spacing at most `spacing`.
std::vector<double> uniform_grid_spacing(double lo, double hi, double spacing);

}  // namespace horizon
