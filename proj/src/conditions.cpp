#include "horizon/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace horizon {

namespace {

constexpr double kWindowSettle = 1e-3;

void require_cover(const Trajectory& trajectory, double t, const char* who) {
  if (trajectory.covers(t)) return;
  if (trajectory.exit_event()) {
    throw NonExtendible(std::string(who) + ": trajectory leaves the state domain before the last horizon",
                        *trajectory.exit_event());
  }
  throw std::invalid_argument(std::string(who) + ": trajectory does not cover the last horizon");
}

// Leading sample at t_lo keeps the tail window anchored to the full range.
std::vector<double> tail_sample_times(double t_lo, double t_hi, const TailPolicy& tail, int samples) {
  if (!(t_hi > t_lo)) throw std::invalid_argument("tail sample: empty time range");
  const double start = t_hi - tail.window_fraction * (t_hi - t_lo);
  std::vector<double> times{t_lo};
  auto body = uniform_grid(start, t_hi, std::max(samples, 2));
  times.insert(times.end(), body.begin(), body.end());
  return times;
}

double extreme(GeneralMode mode, double a, double b) { return mode == GeneralMode::woo ? std::min(a, b) : std::max(a, b); }

}  // namespace

std::string to_string(GeneralMode m) { return m == GeneralMode::woo ? "woo" : "oo"; }

double delta_hamiltonian(const ControlProblem& problem, const Trajectory& trajectory, const ControlSignal& control,
                         const JxRecord& jx, const Vec& u, double tau, double T) {
  if (!problem.control_set.contains(u)) throw std::invalid_argument("delta_hamiltonian: u outside the control set");
  const Vec& j = jx.at(T);
  const Vec x = trajectory.evaluate(tau);
  return hamiltonian(problem, x, u, tau, j, 1.0) - hamiltonian(problem, x, control.evaluate(tau), tau, j, 1.0);
}

GeneralConditionReport check_general(const ControlProblem& problem, const Trajectory& trajectory,
                                     const ControlSignal& control, std::span<const double> tau_grid,
                                     std::span<const Vec> control_grid, std::span<const double> T_grid,
                                     GeneralMode mode, double tol, const IntegratorSettings& settings) {
  if (T_grid.empty() || tau_grid.empty() || control_grid.empty()) {
    throw std::invalid_argument("check_general: empty grid");
  }
  const double t_max = *std::max_element(T_grid.begin(), T_grid.end());
  require_cover(trajectory, t_max, "check_general");
  for (const Vec& u : control_grid) {
    if (!problem.control_set.contains(u)) throw std::invalid_argument("check_general: u outside the control set");
  }

  GeneralConditionReport rep;
  rep.tau_grid.assign(tau_grid.begin(), tau_grid.end());
  rep.control_grid.assign(control_grid.begin(), control_grid.end());
  rep.mode = mode;
  rep.tolerance = tol;
  const double inf = std::numeric_limits<double>::infinity();
  const double init = mode == GeneralMode::woo ? inf : -inf;

  for (double tau : tau_grid) {
    if (!(tau < t_max)) throw std::invalid_argument("check_general: tau must precede the last horizon");
    std::vector<double> grid;
    for (double T : T_grid) {
      if (T >= tau) grid.push_back(T);
    }
    grid.push_back(tau);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const JxRecord jx = accumulate_jx(problem, trajectory, control, tau, grid, settings);

    const Vec x = trajectory.evaluate(tau);
    const Vec u_hat = control.evaluate(tau);
    const Vec f_hat = problem.dynamics(x, u_hat, tau);
    const double g_hat = problem.payoff(x, u_hat, tau);
    const double span = t_max - tau;

    for (const Vec& u : control_grid) {
      const Vec df = problem.dynamics(x, u, tau) - f_hat;
      const double dg = problem.payoff(x, u, tau) - g_hat;
      std::array<double, 3> w{init, init, init};
      for (std::size_t k = 0; k < jx.T_grid.size(); ++k) {
        const double d = jx.T_grid[k] - tau;
        const double dh = dg + jx.values[k].dot(df);
        for (int i = 0; i < 3; ++i) {
          const double hi = span / std::pow(2.0, i);
          if (d >= 0.5 * hi && d <= hi) w[static_cast<std::size_t>(i)] = extreme(mode, w[static_cast<std::size_t>(i)], dh);
        }
      }
      for (double e : w) {
        if (!std::isfinite(e)) throw std::invalid_argument("check_general: T_grid leaves a tail window empty");
      }
      GeneralCell cell{tau, u, w[0], w, Status::inconclusive};
      const bool settled = std::abs(w[0] - w[1]) < kWindowSettle && std::abs(w[1] - w[2]) < kWindowSettle;
      if (settled) {
        cell.status = w[0] <= tol ? Status::holds : Status::fails;
      } else if (w[0] <= w[1] && w[1] <= w[2] && w[0] <= -tol) {
        cell.status = Status::holds;
      } else if (w[0] >= w[1] && w[1] >= w[2] && w[0] > tol) {
        cell.status = Status::fails;
      }
      rep.cells.push_back(std::move(cell));
    }
  }

  ConditionVerdict& v = rep.verdict;
  v.tolerance_used = tol;
  v.status = Status::holds;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const GeneralCell& c = rep.cells[i];
    v.diagnostic_series.emplace_back(static_cast<double>(i), c.estimate);
    if (c.estimate > rep.cells[worst].estimate) worst = i;
    if (c.status == Status::fails) {
      v.status = Status::fails;
    } else if (c.status == Status::inconclusive && v.status == Status::holds) {
      v.status = Status::inconclusive;
    }
  }
  std::ostringstream note;
  note << (mode == GeneralMode::woo ? "liminf" : "limsup") << " of delta H; largest estimate "
       << rep.cells[worst].estimate << " at tau=" << rep.cells[worst].tau << " u=" << rep.cells[worst].u.transpose();
  v.note = note.str();
  return rep;
}

GeneralConditionReport check_general(const ControlProblem& problem, const Trajectory& trajectory,
                                     const ControlSignal& control, std::span<const double> tau_grid,
                                     int control_resolution, std::span<const double> T_grid, GeneralMode mode,
                                     double tol, const IntegratorSettings& settings) {
  const auto grid = problem.control_set.sample_grid(control_resolution);
  return check_general(problem, trajectory, control, tau_grid, grid, T_grid, mode, tol, settings);
}

ClassicalReport check_classical(const ControlProblem& problem, const Trajectory& trajectory,
                                const ControlSignal& control, const CostatePath& costate, double lambda,
                                const TransitionOperator& transition, const TailPolicy& tail, int samples) {
  const double t_lo = std::max({trajectory.t_begin(), costate.path.t_begin(), transition.t0()});
  const double t_hi = std::min({trajectory.t_end(), costate.path.t_end(), transition.t_end()});
  const auto times = tail_sample_times(t_lo, t_hi, tail, samples);

  std::vector<double> psi_norm, x_psi, ham, kav;
  for (double t : times) {
    const Vec psi = costate.psi(t);
    const Vec x = trajectory.evaluate(t);
    psi_norm.push_back(psi.norm());
    x_psi.push_back(x.dot(psi));
    ham.push_back(hamiltonian(problem, x, control.evaluate(t), t, psi, lambda));
    kav.push_back((transition.fundamental(t).transpose() * psi).norm());
  }
  return {limit_is_zero(times, psi_norm, tail), limit_is_zero(times, x_psi, tail), limit_is_zero(times, ham, tail),
          limit_is_zero(times, kav, tail)};
}

ConditionVerdict check_max_principle(const ControlProblem& problem, const Trajectory& trajectory,
                                     const ControlSignal& control, const CostatePath& costate, double lambda,
                                     int control_resolution, std::span<const double> time_grid, double tol) {
  const auto grid = problem.control_set.sample_grid(control_resolution);
  ConditionVerdict v;
  v.tolerance_used = tol;
  v.status = Status::holds;
  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (double t : time_grid) {
    if (!trajectory.covers(t) || !costate.path.covers(t)) {
      throw std::invalid_argument("check_max_principle: time outside the trajectory or costate span");
    }
    const Vec x = trajectory.evaluate(t);
    const Vec psi = costate.psi(t);
    const double h_hat = hamiltonian(problem, x, control.evaluate(t), t, psi, lambda);
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec& u : grid) best = std::max(best, hamiltonian(problem, x, u, t, psi, lambda));
    const double gap = best - h_hat;
    v.diagnostic_series.emplace_back(t, gap);
    if (gap > worst) {
      worst = gap;
      worst_t = t;
    }
    if (gap > tol) v.status = Status::fails;
  }
  std::ostringstream note;
  note << "max_u H - H(u_hat) peaks at " << worst << " (t=" << worst_t << ")";
  v.note = note.str();
  return v;
}

CostateDecomposition decompose_costate(const CostatePath& costate, const TransitionOperator& transition,
                                       std::span<const JxRecord> jx_by_tau, double lambda, const TailPolicy& tail,
                                       int samples) {
  const double t_lo = std::max(costate.path.t_begin(), transition.t0());
  const double t_hi = std::min(costate.path.t_end(), transition.t_end());
  const auto times = tail_sample_times(t_lo, t_hi, tail, samples);
  const double start = times[1];

  std::vector<Vec> z;
  for (double t : times) z.push_back(transition.fundamental(t).transpose() * costate.psi(t));
  const auto n = z.front().size();

  CostateDecomposition out;
  ConditionVerdict& v = out.verdict;
  v.tolerance_used = tail.converge_tol;
  Vec mean(n);
  double osc = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    std::vector<double> vals;
    for (const Vec& zi : z) vals.push_back(zi[c]);
    const TailStats st = tail_stats(times, vals, start);
    mean[c] = st.mean;
    osc = std::max(osc, st.oscillation());
  }
  for (std::size_t i = 1; i < times.size(); ++i) v.diagnostic_series.emplace_back(times[i], z[i].norm());

  std::ostringstream note;
  note << "tail oscillation of K*(t, t0) psi(t): " << osc;
  if (osc < tail.converge_tol) {
    v.status = Status::holds;
    out.a0 = mean;
  } else {
    v.status = osc >= tail.fail_tol ? Status::fails : Status::inconclusive;
    out.residual = std::numeric_limits<double>::quiet_NaN();
    v.note = note.str();
    return out;
  }

  std::vector<double> taus;
  for (const auto& rec : jx_by_tau) taus.push_back(rec.tau);
  if (lambda == 0.0) {
    auto extra = uniform_grid(t_lo, t_hi, 21);
    taus.insert(taus.end(), extra.begin(), extra.end());
  }
  double residual = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double tau = taus[i];
    Vec r = costate.psi(tau) - transition.evaluate(transition.t0(), tau).transpose() * *out.a0;
    if (lambda != 0.0 && i < jx_by_tau.size()) {
      const LimitCostate lc = limit_costate(jx_by_tau[i], tail);
      if (!lc.psi_hat) {
        residual = std::numeric_limits<double>::quiet_NaN();
        note << "; psi_hat unavailable at tau=" << tau;
        break;
      }
      r -= lambda * *lc.psi_hat;
    }
    residual = std::max(residual, r.lpNorm<Eigen::Infinity>());
  }
  out.residual = residual;
  note << "; a0=" << out.a0->transpose() << "; residual " << residual;
  v.note = note.str();
  return out;
}

namespace {

// Times where a scalar trajectory passes through level x.
std::vector<double> level_crossings(const Trajectory& tr, double x) {
  std::vector<double> out;
  const auto& ts = tr.times();
  const auto& xs = tr.states();
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = xs[i][0] - x;
    const double b = xs[i + 1][0] - x;
    if (a == 0.0) {
      out.push_back(ts[i]);
      continue;
    }
    if (a * b > 0.0 || !(ts[i] < ts[i + 1])) continue;
    double lo = ts[i];
    double hi = ts[i + 1];
    double flo = a;
    for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = tr.evaluate(mid)[0] - x;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  if (!ts.empty() && xs.back()[0] == x) out.push_back(ts.back());
  return out;
}

}  // namespace

std::vector<ConditionVerdict> check_gmax(const ControlProblem& problem, std::span<const GmaxCandidate> candidates,
                                         std::span<const double> time_grid, double tol) {
  if (problem.state_dim != 1) throw std::invalid_argument("check_gmax: fiber matching needs a scalar state");
  for (const auto& cand : candidates) {
    const Trajectory& tr = cand.trajectory;
    for (double t : uniform_grid(tr.t_begin(), tr.t_end(), 5)) {
      const Vec gx = jacobians(problem, tr.evaluate(t), cand.control.evaluate(t), t).second;
      if (gx.lpNorm<Eigen::Infinity>() > 1e-12) {
        throw std::invalid_argument("check_gmax: payoff depends on the state, rule not applicable");
      }
    }
  }

  std::vector<ConditionVerdict> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ConditionVerdict& v = out[i];
    v.tolerance_used = tol;
    const GmaxCandidate& me = candidates[i];
    if (me.trajectory.exit_event()) {
      v.status = Status::fails;
      v.note = "infeasible: " + me.trajectory.exit_event()->description;
      continue;
    }
    v.status = Status::holds;
    int violations = 0;
    int compared = 0;
    for (double t : time_grid) {
      if (!me.trajectory.covers(t)) continue;
      const Vec x = me.trajectory.evaluate(t);
      const double g_me = problem.payoff(x, me.control.evaluate(t), t);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < candidates.size(); ++j) {
        if (j == i || candidates[j].trajectory.exit_event()) continue;
        for (double s : level_crossings(candidates[j].trajectory, x[0])) {
          best = std::max(best, problem.payoff(x, candidates[j].control.evaluate(s), t));
        }
      }
      if (!std::isfinite(best)) continue;
      ++compared;
      v.diagnostic_series.emplace_back(t, best - g_me);
      if (best > g_me + tol) {
        ++violations;
        v.status = Status::fails;
      }
    }
    std::ostringstream note;
    note << violations << " of " << compared << " compared times beaten by another candidate";
    v.note = note.str();
  }
  return out;
}

}  // namespace horizon
