#include "horizon/control_signal.hpp"

#include <algorithm>
#include <stdexcept>

namespace horizon {

namespace {

std::vector<double> merge_breakpoints(std::vector<double> a, std::span<const double> b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

ControlSignal ControlSignal::constant(Vec u) {
  ControlSignal c;
  c.kind_ = Kind::constant;
  c.eval_ = [u = std::move(u)](double, Side) { return u; };
  return c;
}

ControlSignal ControlSignal::piecewise_constant(std::vector<double> breakpoints, std::vector<Vec> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("piecewise_constant: need one more value than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i - 1] < breakpoints[i])) {
      throw std::invalid_argument("piecewise_constant: breakpoints must increase strictly");
    }
  }
  ControlSignal c;
  c.kind_ = Kind::piecewise_constant;
  c.breakpoints_ = breakpoints;
  c.eval_ = [bps = std::move(breakpoints), vals = std::move(values)](double t, Side side) {
    // Segment index = number of breakpoints strictly left of t (or at t for right limits).
    auto it = side == Side::right_limit ? std::upper_bound(bps.begin(), bps.end(), t)
                                        : std::lower_bound(bps.begin(), bps.end(), t);
    return vals[static_cast<std::size_t>(it - bps.begin())];
  };
  return c;
}

ControlSignal ControlSignal::closed_form(std::function<Vec(double)> fn, std::vector<double> breakpoints) {
  if (!fn) throw std::invalid_argument("closed_form: empty function");
  std::sort(breakpoints.begin(), breakpoints.end());
  ControlSignal c;
  c.kind_ = Kind::closed_form;
  c.breakpoints_ = std::move(breakpoints);
  c.eval_ = [fn = std::move(fn)](double t, Side) { return fn(t); };
  return c;
}

ControlSignal ControlSignal::with_needle(double tau, double alpha, Vec u) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("needle width must be positive");
  ControlSignal c;
  c.kind_ = kind_ == Kind::closed_form ? Kind::closed_form : Kind::piecewise_constant;
  const double start = tau - alpha;
  c.breakpoints_ = merge_breakpoints(breakpoints_, std::vector<double>{start, tau});
  c.eval_ = [base = eval_, start, tau, u = std::move(u)](double t, Side side) {
    const bool in = side == Side::right_limit ? (t >= start && t < tau) : (t > start && t <= tau);
    return in ? u : base(t, side);
  };
  return c;
}

Vec ControlSignal::evaluate(double t, Side side) const { return eval_(t, side); }

Vec ControlSignal::evaluate_within(double t, double lo, double hi) const {
  if (t <= lo) return eval_(t, Side::right_limit);
  if (t >= hi) return eval_(t, Side::left_limit);
  return eval_(t, Side::convention);
}

Trajectory solve_state(const ControlProblem& problem, const ControlSignal& control, double t0, const Vec& x0,
                       double t_end, const IntegratorSettings& settings, std::span<const double> stops) {
  if (!problem.state_domain.contains(x0)) throw std::invalid_argument("solve_state: x0 outside the state domain");
  auto make_field = [&](double lo, double hi) -> Field {
    return [&, lo, hi](double t, const Vec& x) { return problem.dynamics(x, control.evaluate_within(t, lo, hi), t); };
  };
  return integrate_segmented(make_field, t0, x0, t_end, control.breakpoints(), settings, problem.state_domain,
                             stops);
}

Trajectory solve_with_payoff(const ControlProblem& problem, const ControlSignal& control, double t0, const Vec& x0,
                             double t_end, const IntegratorSettings& settings, std::span<const double> stops) {
  if (!problem.state_domain.contains(x0)) {
    throw std::invalid_argument("solve_with_payoff: x0 outside the state domain");
  }
  const int n = problem.state_dim;
  auto make_field = [&, n](double lo, double hi) -> Field {
    return [&, n, lo, hi](double t, const Vec& y) {
      const Vec x = y.head(n);
      const Vec u = control.evaluate_within(t, lo, hi);
      Vec out(n + 1);
      out << problem.dynamics(x, u, t), problem.payoff(x, u, t);
      return out;
    };
  };
  Vec y0(n + 1);
  y0 << x0, 0.0;
  const Box domain = problem.state_domain.stacked(Box::unbounded(1));
  return integrate_segmented(make_field, t0, y0, t_end, control.breakpoints(), settings, domain, stops);
}

Trajectory solve_paired_payoff(const ControlProblem& problem, const ControlSignal& control_a, const Vec& x_a,
                               const ControlSignal& control_b, const Vec& x_b, double t0, double t_end,
                               const IntegratorSettings& settings, std::span<const double> stops) {
  if (!problem.state_domain.contains(x_a) || !problem.state_domain.contains(x_b)) {
    throw std::invalid_argument("solve_paired_payoff: initial state outside the state domain");
  }
  const int n = problem.state_dim;
  auto make_field = [&, n](double lo, double hi) -> Field {
    return [&, n, lo, hi](double t, const Vec& y) {
      const Vec xa = y.head(n);
      const Vec xb = y.segment(n + 1, n);
      const Vec ua = control_a.evaluate_within(t, lo, hi);
      const Vec ub = control_b.evaluate_within(t, lo, hi);
      Vec out(2 * n + 2);
      out << problem.dynamics(xa, ua, t), problem.payoff(xa, ua, t), problem.dynamics(xb, ub, t),
          problem.payoff(xb, ub, t);
      return out;
    };
  };
  Vec y0(2 * n + 2);
  y0 << x_a, 0.0, x_b, 0.0;
  const Box one = problem.state_domain.stacked(Box::unbounded(1));
  const auto breakpoints = merge_breakpoints(control_a.breakpoints(), control_b.breakpoints());
  return integrate_segmented(make_field, t0, y0, t_end, breakpoints, settings, one.stacked(one), stops);
}

double paired_gap(const Trajectory& paired, int state_dim, double T) {
  const Vec y = paired.evaluate(T);
  return y[state_dim] - y[2 * state_dim + 1];
}

}  // namespace horizon
