#pragma once

#include <functional>
#include <span>
#include <vector>

#include "horizon/ode.hpp"
#include "horizon/problem.hpp"

namespace horizon {

/// Open-loop control u(t). Piecewise signals use the interval convention
/// (b_i, b_{i+1}]: at a breakpoint the value of the segment ending there is
/// returned, which matches a needle on (tau - alpha, tau].
class ControlSignal {
 public:
  enum class Kind { constant, piecewise_constant, closed_form };

  /// Side selector for one-sided limits at breakpoints.
  enum class Side { convention, right_limit, left_limit };

  static ControlSignal constant(Vec u);
  /// values.size() == breakpoints.size() + 1; breakpoints strictly increasing.
  static ControlSignal piecewise_constant(std::vector<double> breakpoints, std::vector<Vec> values);
  /// `breakpoints` lists times where `fn` may jump.
  static ControlSignal closed_form(std::function<Vec(double)> fn, std::vector<double> breakpoints = {});

  /// Replaces the control by `u` on (tau - alpha, tau].
  [[nodiscard]] ControlSignal with_needle(double tau, double alpha, Vec u) const;

  [[nodiscard]] Vec evaluate(double t, Side side = Side::convention) const;
  /// Value as seen from inside the segment [lo, hi]: right limit at lo, left limit at hi.
  [[nodiscard]] Vec evaluate_within(double t, double lo, double hi) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  Kind kind_ = Kind::constant;
  std::function<Vec(double, Side)> eval_;
  std::vector<double> breakpoints_;
};

/// x' = f(x, u(t), t) from (t0, x0) to t_end inside the problem's state domain.
/// An exit event marks a trajectory that cannot be extended in X.
Trajectory solve_state(const ControlProblem& problem, const ControlSignal& control, double t0, const Vec& x0,
                       double t_end, const IntegratorSettings& settings = {}, std::span<const double> stops = {});

/// State augmented with the running payoff: components [x (n), J (1)].
Trajectory solve_with_payoff(const ControlProblem& problem, const ControlSignal& control, double t0, const Vec& x0,
                             double t_end, const IntegratorSettings& settings = precise_settings(),
                             std::span<const double> stops = {});

/// Two payoff-augmented copies integrated as one system so both share the
/// same steps: components [x_a (n), J_a, x_b (n), J_b]. Used wherever payoff
/// differences must be resolved far below the payoff magnitude.
Trajectory solve_paired_payoff(const ControlProblem& problem, const ControlSignal& control_a, const Vec& x_a,
                               const ControlSignal& control_b, const Vec& x_b, double t0, double t_end,
                               const IntegratorSettings& settings = precise_settings(),
                               std::span<const double> stops = {});

/// J_a(T) - J_b(T) from a paired trajectory.
double paired_gap(const Trajectory& paired, int state_dim, double T);

}  // namespace horizon
