#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "horizon/control_signal.hpp"
#include "horizon/ode.hpp"
#include "horizon/problem.hpp"

namespace horizon {

/// Payoff J(u, x0, t0, T) accumulated alongside the state. Throws
/// NonExtendible when the trajectory leaves the state domain before T.
double finite_horizon_value(const ControlProblem& problem, const ControlSignal& control, const Vec& x0, double t0,
                            double T, const IntegratorSettings& settings = precise_settings());

/// Control replaced by the constant u on (tau - alpha, tau].
struct NeedleSpec {
  double tau = 0.0;
  double alpha = 0.0;
  Vec u;

  /// Throws std::invalid_argument unless alpha > 0, u is admissible and the
  /// interval starts at or after t0.
  void validate(const ControlProblem& problem) const;
};

/// J(needled) - J(base) from the problem's initial point up to T.
double needle_gap(const ControlProblem& problem, const ControlSignal& base_control, const NeedleSpec& needle, double T,
                  const IntegratorSettings& settings = precise_settings());

struct NeedleRow {
  double alpha = 0.0;
  double quotient = 0.0;    // needle gap / alpha
  double prediction = 0.0;  // <J_x(tau, T), y(tau)> + delta g
  double error = 0.0;
  double order = 0.0;       // log(error ratio) / log(alpha ratio) against the previous row; NaN on the first
};

struct NeedleReport {
  double tau = 0.0;
  Vec u;
  double T = 0.0;
  std::vector<NeedleRow> rows;
  double fitted_c = 0.0;   // max error / alpha
  double min_order = 0.0;  // NaN when every error sits at the noise floor
};

/// Difference quotients of needle gaps against the first-order prediction.
NeedleReport needle_limit_check(const ControlProblem& problem, const ControlSignal& base_control, double tau,
                                const Vec& u, double T, std::span<const double> alphas,
                                const IntegratorSettings& settings = precise_settings());

enum class OvertakingVerdict { consistent_oo, consistent_woo_only, violates_woo, non_extendible_challenger, inconclusive };

std::string to_string(OvertakingVerdict v);

struct GapWindow {
  double lo = 0.0;
  double hi = 0.0;
  double max_gap = 0.0;
  double argmax = 0.0;
  int within_eps = 0;  // samples with gap <= eps
  int above_eps = 0;   // samples with gap > eps
};

struct OvertakingReport {
  ControlSignal candidate;
  ControlSignal challenger;
  double eps = 0.0;
  std::vector<std::pair<double, double>> horizon_samples;  // (T', J(challenger) - J(candidate))
  OvertakingVerdict verdict = OvertakingVerdict::inconclusive;
  std::vector<double> checkpoints;
  std::vector<GapWindow> windows;  // [T_max/8, T_max/4], [T_max/4, T_max/2], [T_max/2, T_max]
  double max_gap = 0.0;
  double argmax = 0.0;
  double challenger_u_min = 0.0;  // range of challenger control values over the samples
  double challenger_u_max = 0.0;
  std::optional<ExitEvent> challenger_exit;
};

/// Samples gap(T') on a uniform grid up to T_max and classifies it against
/// the overtaking definitions. Empty checkpoints default to T_max/8, /4, /2.
OvertakingReport empirical_overtaking_test(const ControlProblem& problem, const ControlSignal& candidate,
                                           const ControlSignal& challenger, double eps = 1e-6,
                                           std::span<const double> checkpoints = {}, double T_max = 400.0,
                                           double spacing = 0.01,
                                           const IntegratorSettings& settings = precise_settings());

/// Integral of sin(T - t)(u(t) - 1) over [0, T] for a scalar control.
double oscillator_delta_x1(const ControlSignal& control, double T);

/// Integral of sin(t)(u(t) - 1) over [a, b].
double oscillator_sine_moment(const ControlSignal& control, double a, double b);

/// Pieces of the one-period recursion for D(T) = delta x1(T) at T = 2n pi.
struct PeriodSplit {
  int n = 1;
  double current = 0.0;       // D(2n pi)
  double previous = 0.0;      // D(2(n-1) pi)
  double rising_half = 0.0;   // integral of sin t (u - 1) over [(2n-2) pi, (2n-1) pi]
  double falling_half = 0.0;  // same over [(2n-1) pi, 2n pi]
  /// D(2n pi) + D(2(n-1) pi) + falling_half: the recursion as usually stated.
  [[nodiscard]] double stated_residual() const { return current + previous + falling_half; }
  /// D(2n pi) - D(2(n-1) pi) + rising_half + falling_half: exact recursion.
  [[nodiscard]] double exact_residual() const { return current - previous + rising_half + falling_half; }
};

PeriodSplit oscillator_period_split(const ControlSignal& control, int n);

}  // namespace horizon
