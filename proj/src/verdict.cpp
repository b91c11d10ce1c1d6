#include "horizon/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace horizon {

std::string to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    case Status::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

TailStats tail_stats(std::span<const double> times, std::span<const double> values, double window_start) {
  if (times.size() != values.size()) throw std::invalid_argument("tail_stats: size mismatch");
  TailStats st{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window_start) continue;
    st.min = std::min(st.min, values[i]);
    st.max = std::max(st.max, values[i]);
    st.mean += values[i];
    ++count;
  }
  if (count == 0) throw std::invalid_argument("tail_stats: empty tail window");
  st.mean /= static_cast<double>(count);
  return st;
}

ConditionVerdict limit_is_zero(std::span<const double> times, std::span<const double> values,
                               const TailPolicy& policy) {
  if (times.empty()) throw std::invalid_argument("limit_is_zero: empty series");
  const double t_lo = times.front();
  const double t_hi = times.back();
  const double start = t_hi - policy.window_fraction * (t_hi - t_lo);
  const TailStats st = tail_stats(times, values, start);

  ConditionVerdict v;
  v.tolerance_used = policy.converge_tol;
  const bool finite = std::isfinite(st.oscillation()) && std::isfinite(st.mean);
  if (finite && st.oscillation() < policy.converge_tol && std::abs(st.mean) < policy.converge_tol) {
    v.status = Status::holds;
  } else if (!finite || st.oscillation() >= policy.fail_tol || std::abs(st.mean) >= policy.fail_tol) {
    v.status = Status::fails;
  } else {
    v.status = Status::inconclusive;
  }
  std::ostringstream note;
  note << "tail [" << start << ", " << t_hi << "]: mean=" << st.mean << " oscillation=" << st.oscillation();
  v.note = note.str();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= start) v.diagnostic_series.emplace_back(times[i], values[i]);
  }
  return v;
}

std::vector<double> geometric_grid(double origin, double lo, double hi, int count) {
  if (count < 2 || !(lo > origin) || !(hi > lo)) throw std::invalid_argument("geometric_grid: bad arguments");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double ratio = std::pow((hi - origin) / (lo - origin), 1.0 / (count - 1));
  double d = lo - origin;
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = (i == count - 1) ? hi : origin + d;
    d *= ratio;
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("uniform_grid: count must be positive");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1);
  }
  return out;
}

std::vector<double> uniform_grid_spacing(double lo, double hi, double spacing) {
  if (!(spacing > 0.0) || hi < lo) throw std::invalid_argument("uniform_grid_spacing: bad arguments");
  const int count = std::max(2, static_cast<int>(std::ceil((hi - lo) / spacing)) + 1);
  return uniform_grid(lo, hi, count);
}

}  // namespace horizon
