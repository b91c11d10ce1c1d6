#include "horizon/overtaking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "horizon/variational.hpp"
#include "horizon/verdict.hpp"

namespace horizon {

double finite_horizon_value(const ControlProblem& problem, const ControlSignal& control, const Vec& x0, double t0,
                            double T, const IntegratorSettings& settings) {
  if (T < t0) throw std::invalid_argument("finite_horizon_value: T precedes t0");
  if (T == t0) return 0.0;
  const Trajectory tr = solve_with_payoff(problem, control, t0, x0, T, settings);
  if (tr.exit_event()) {
    throw NonExtendible("finite_horizon_value: trajectory is not extendible to T", *tr.exit_event());
  }
  return tr.evaluate(T)[problem.state_dim];
}

void NeedleSpec::validate(const ControlProblem& problem) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("needle: alpha must be positive");
  if (!problem.control_set.contains(u)) throw std::invalid_argument("needle: u outside the control set");
  if (tau - alpha < problem.initial_time - 1e-12) throw std::invalid_argument("needle: interval starts before t0");
}

double needle_gap(const ControlProblem& problem, const ControlSignal& base_control, const NeedleSpec& needle, double T,
                  const IntegratorSettings& settings) {
  needle.validate(problem);
  if (T < needle.tau) throw std::invalid_argument("needle_gap: T precedes the needle");
  const ControlSignal varied = base_control.with_needle(needle.tau, needle.alpha, needle.u);
  const Vec& x0 = problem.initial_state;
  const Trajectory paired =
      solve_paired_payoff(problem, varied, x0, base_control, x0, problem.initial_time, T, settings);
  if (paired.exit_event()) {
    throw NonExtendible("needle_gap: trajectory is not extendible to T", *paired.exit_event());
  }
  return paired_gap(paired, problem.state_dim, T);
}

NeedleReport needle_limit_check(const ControlProblem& problem, const ControlSignal& base_control, double tau,
                                const Vec& u, double T, std::span<const double> alphas,
                                const IntegratorSettings& settings) {
  if (alphas.empty()) throw std::invalid_argument("needle_limit_check: no widths");
  const Trajectory base = solve_state(problem, base_control, problem.initial_time, problem.initial_state, T, settings,
                                      std::vector<double>{tau});
  if (base.exit_event()) throw NonExtendible("needle_limit_check: base trajectory exits", *base.exit_event());
  const std::vector<double> horizons{tau, T};
  const JxRecord jx = accumulate_jx(problem, base, base_control, tau, horizons, settings);

  const Vec x = base.evaluate(tau);
  const Vec u_hat = base_control.evaluate(tau, ControlSignal::Side::left_limit);
  const Vec y = problem.dynamics(x, u, tau) - problem.dynamics(x, u_hat, tau);
  const double prediction = jx.at(T).dot(y) + problem.payoff(x, u, tau) - problem.payoff(x, u_hat, tau);

  NeedleReport rep;
  rep.tau = tau;
  rep.u = u;
  rep.T = T;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.min_order = nan;
  constexpr double floor = 1e-11;
  for (double alpha : alphas) {
    const double gap = needle_gap(problem, base_control, NeedleSpec{tau, alpha, u}, T, settings);
    NeedleRow row{alpha, gap / alpha, prediction, std::abs(gap / alpha - prediction), nan};
    if (!rep.rows.empty()) {
      const NeedleRow& prev = rep.rows.back();
      if (prev.error > floor && row.error > floor) {
        row.order = std::log(prev.error / row.error) / std::log(prev.alpha / alpha);
        rep.min_order = std::isnan(rep.min_order) ? row.order : std::min(rep.min_order, row.order);
      }
    }
    rep.fitted_c = std::max(rep.fitted_c, row.error / alpha);
    rep.rows.push_back(row);
  }
  return rep;
}

std::string to_string(OvertakingVerdict v) {
  switch (v) {
    case OvertakingVerdict::consistent_oo: return "consistent_OO";
    case OvertakingVerdict::consistent_woo_only: return "consistent_WOO_only";
    case OvertakingVerdict::violates_woo: return "violates_WOO";
    case OvertakingVerdict::non_extendible_challenger: return "non_extendible_challenger";
    case OvertakingVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

OvertakingReport empirical_overtaking_test(const ControlProblem& problem, const ControlSignal& candidate,
                                           const ControlSignal& challenger, double eps,
                                           std::span<const double> checkpoints, double T_max, double spacing,
                                           const IntegratorSettings& settings) {
  const double t0 = problem.initial_time;
  if (!(T_max > t0)) throw std::invalid_argument("empirical_overtaking_test: T_max must exceed t0");
  OvertakingReport rep;
  rep.candidate = candidate;
  rep.challenger = challenger;
  rep.eps = eps;
  if (checkpoints.empty()) {
    rep.checkpoints = {t0 + (T_max - t0) / 8, t0 + (T_max - t0) / 4, t0 + (T_max - t0) / 2};
  } else {
    rep.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  }

  const Vec& x0 = problem.initial_state;
  const auto grid = uniform_grid_spacing(t0, T_max, spacing);
  const Trajectory paired = solve_paired_payoff(problem, challenger, x0, candidate, x0, t0, T_max, settings, grid);
  const int n = problem.state_dim;
  if (paired.exit_event() && paired.exit_event()->component > n) {
    throw NonExtendible("empirical_overtaking_test: candidate is not extendible to T_max", *paired.exit_event());
  }
  rep.challenger_exit = paired.exit_event();

  rep.challenger_u_min = std::numeric_limits<double>::infinity();
  rep.challenger_u_max = -std::numeric_limits<double>::infinity();
  rep.max_gap = -std::numeric_limits<double>::infinity();
  for (double T : grid) {
    if (!paired.covers(T)) break;
    const double gap = paired_gap(paired, n, T);
    rep.horizon_samples.emplace_back(T, gap);
    if (gap > rep.max_gap) {
      rep.max_gap = gap;
      rep.argmax = T;
    }
    const Vec u = challenger.evaluate(T);
    rep.challenger_u_min = std::min(rep.challenger_u_min, u.minCoeff());
    rep.challenger_u_max = std::max(rep.challenger_u_max, u.maxCoeff());
  }

  const std::array<double, 4> edges{t0 + (T_max - t0) / 8, t0 + (T_max - t0) / 4, t0 + (T_max - t0) / 2, T_max};
  for (std::size_t w = 0; w < 3; ++w) {
    GapWindow win{edges[w], edges[w + 1], -std::numeric_limits<double>::infinity(), 0.0, 0, 0};
    for (const auto& [T, gap] : rep.horizon_samples) {
      if (T < win.lo || T > win.hi) continue;
      if (gap > win.max_gap) {
        win.max_gap = gap;
        win.argmax = T;
      }
      (gap <= eps ? win.within_eps : win.above_eps)++;
    }
    rep.windows.push_back(win);
  }

  if (rep.challenger_exit) {
    rep.verdict = OvertakingVerdict::non_extendible_challenger;
    return rep;
  }
  auto all_beyond = [&](double c, bool good) {
    bool any = false;
    for (const auto& [T, gap] : rep.horizon_samples) {
      if (T < c) continue;
      any = true;
      if ((gap <= eps) != good) return false;
    }
    return any;
  };
  const double half = t0 + (T_max - t0) / 2;
  for (double c : rep.checkpoints) {
    if (c <= half + 1e-12 && all_beyond(c, true)) {
      rep.verdict = OvertakingVerdict::consistent_oo;
      return rep;
    }
  }
  for (double c : rep.checkpoints) {
    if (c <= half + 1e-12 && all_beyond(c, false)) {
      rep.verdict = OvertakingVerdict::violates_woo;
      return rep;
    }
  }
  const bool recurring = std::all_of(rep.windows.begin(), rep.windows.end(),
                                     [](const GapWindow& w) { return w.within_eps > 0 && w.above_eps > 0; });
  rep.verdict = recurring ? OvertakingVerdict::consistent_woo_only : OvertakingVerdict::inconclusive;
  return rep;
}

namespace {

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

template <class F>
double integrate_split(const ControlSignal& control, double a, double b, F&& integrand) {
  if (b <= a) return 0.0;
  std::vector<double> cuts{a};
  for (double bp : control.breakpoints()) {
    if (bp > a && bp < b) cuts.push_back(bp);
  }
  cuts.push_back(b);
  double sum = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s];
    const double hi = cuts[s + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.25)));
    const double h = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double l = lo + p * h;
      const double r = p == pieces - 1 ? hi : l + h;
      const double mid = 0.5 * (l + r);
      const double half = 0.5 * (r - l);
      for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
        const double t = mid + half * kGlNodes[k];
        sum += half * kGlWeights[k] * integrand(t, control.evaluate_within(t, lo, hi)[0]);
      }
    }
  }
  return sum;
}

}  // namespace

double oscillator_delta_x1(const ControlSignal& control, double T) {
  return integrate_split(control, 0.0, T, [T](double t, double u) { return std::sin(T - t) * (u - 1.0); });
}

double oscillator_sine_moment(const ControlSignal& control, double a, double b) {
  return integrate_split(control, a, b, [](double t, double u) { return std::sin(t) * (u - 1.0); });
}

PeriodSplit oscillator_period_split(const ControlSignal& control, int n) {
  if (n < 1) throw std::invalid_argument("oscillator_period_split: n must be at least 1");
  constexpr double pi = std::numbers::pi;
  PeriodSplit s;
  s.n = n;
  s.current = oscillator_delta_x1(control, 2.0 * n * pi);
  s.previous = oscillator_delta_x1(control, 2.0 * (n - 1) * pi);
  s.rising_half = oscillator_sine_moment(control, (2.0 * n - 2.0) * pi, (2.0 * n - 1.0) * pi);
  s.falling_half = oscillator_sine_moment(control, (2.0 * n - 1.0) * pi, 2.0 * n * pi);
  return s;
}

}  // namespace horizon
