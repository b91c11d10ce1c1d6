#include "horizon/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace horizon {

namespace {

Vec flatten(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unflatten(const Vec& v, int n) { return Eigen::Map<const Mat>(v.data(), n, n); }

Mat jacobian_at(const ControlProblem& problem, const Trajectory& trajectory, const ControlSignal& control, double t,
                double lo, double hi) {
  return jacobians(problem, trajectory.evaluate(t), control.evaluate_within(t, lo, hi), t).first;
}

std::vector<double> with_extra(std::span<const double> grid, std::initializer_list<double> extra) {
  std::vector<double> out(grid.begin(), grid.end());
  out.insert(out.end(), extra.begin(), extra.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool monotone(std::span<const double> v) {
  bool inc = true;
  bool dec = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) inc = false;
    if (v[i] > v[i - 1]) dec = false;
  }
  return inc || dec;
}

}  // namespace

TransitionOperator::TransitionOperator(Trajectory base_trajectory, ControlSignal base_control, double anchor,
                                       Trajectory phi, int n)
    : base_trajectory_(std::move(base_trajectory)),
      base_control_(std::move(base_control)),
      anchor_(anchor),
      phi_(std::move(phi)),
      n_(n) {}

Mat TransitionOperator::phi(double t) const { return unflatten(phi_.evaluate(t), n_); }

Mat TransitionOperator::evaluate(double t, double tau) const {
  if (t == tau) return Mat::Identity(n_, n_);
  const Mat pt = phi(t);
  const Mat ps = phi(tau);
  // K(t, tau) = Phi(t) Phi(tau)^{-1}
  return ps.transpose().partialPivLu().solve(pt.transpose()).transpose();
}

Mat TransitionOperator::fundamental(double t) const { return evaluate(t, t0()); }

TransitionOperator transition_matrix(const ControlProblem& problem, const Trajectory& trajectory,
                                     const ControlSignal& control, double tau, std::span<const double> t_grid,
                                     const IntegratorSettings& settings) {
  if (trajectory.empty() || !trajectory.covers(tau)) {
    throw std::invalid_argument("transition_matrix: tau outside the trajectory span");
  }
  for (double t : t_grid) {
    if (!trajectory.covers(t)) throw std::invalid_argument("transition_matrix: t_grid outside the trajectory span");
  }
  const int n = problem.state_dim;
  auto make_field = [&, n](double lo, double hi) -> Field {
    return [&, n, lo, hi](double t, const Vec& y) {
      return flatten(jacobian_at(problem, trajectory, control, t, lo, hi) * unflatten(y, n));
    };
  };
  const Vec y0 = flatten(Mat::Identity(n, n));
  std::vector<Trajectory> pieces;
  try {
    if (tau < trajectory.t_end()) {
      pieces.push_back(integrate_segmented(make_field, tau, y0, trajectory.t_end(), control.breakpoints(), settings,
                                           std::nullopt, t_grid));
    }
    if (tau > trajectory.t_begin()) {
      pieces.push_back(integrate_segmented(make_field, tau, y0, trajectory.t_begin(), control.breakpoints(),
                                           settings, std::nullopt, t_grid));
    }
  } catch (const IntegrationError& e) {
    throw IntegrationError(std::string("transition_matrix: ") + e.what());
  }
  if (pieces.empty()) {
    pieces.emplace_back(std::vector<double>{tau}, std::vector<Vec>{y0}, std::vector<Vec>{Vec::Zero(n * n)});
  }
  return TransitionOperator(trajectory, control, tau, Trajectory::concatenate(std::move(pieces)), n);
}

std::size_t JxRecord::index_of(double T) const {
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (std::abs(T_grid[i] - T) <= 1e-12 * std::max(1.0, std::abs(T))) return i;
  }
  std::ostringstream msg;
  msg << "JxRecord: horizon T=" << T << " is not on the grid of tau=" << tau;
  throw std::invalid_argument(msg.str());
}

JxRecord accumulate_jx(const ControlProblem& problem, const Trajectory& trajectory, const ControlSignal& control,
                       double tau, std::span<const double> T_grid, const IntegratorSettings& settings) {
  if (!trajectory.covers(tau)) throw std::invalid_argument("accumulate_jx: tau outside the trajectory span");
  std::vector<double> grid(T_grid.begin(), T_grid.end());
  std::sort(grid.begin(), grid.end());
  if (grid.empty()) throw std::invalid_argument("accumulate_jx: empty horizon grid");
  if (grid.front() < tau) throw std::invalid_argument("accumulate_jx: horizons must not precede tau");

  JxRecord rec;
  rec.tau = tau;
  const double end = trajectory.t_end();
  if (grid.back() > end + 1e-12 * std::max(1.0, end)) {
    rec.truncated = true;
    std::erase_if(grid, [end](double T) { return T > end; });
    if (grid.empty()) throw std::invalid_argument("accumulate_jx: trajectory ends before every horizon");
  }

  const int n = problem.state_dim;
  const int nn = n * n;
  auto make_field = [&, n, nn](double lo, double hi) -> Field {
    return [&, n, nn, lo, hi](double t, const Vec& y) {
      const Vec x = trajectory.evaluate(t);
      const Vec u = control.evaluate_within(t, lo, hi);
      const auto [a, gx] = jacobians(problem, x, u, t);
      const Mat k = unflatten(y.head(nn), n);
      Vec out(nn + n);
      out << flatten(a * k), k.transpose() * gx;
      return out;
    };
  };
  Vec y0(nn + n);
  y0 << flatten(Mat::Identity(n, n)), Vec::Zero(n);
  const Trajectory aug =
      integrate_segmented(make_field, tau, y0, grid.back(), control.breakpoints(), settings, std::nullopt, grid);

  double running = 0.0;
  for (double T : grid) {
    Vec v = aug.evaluate(T).tail(n);
    running = std::max(running, v.lpNorm<Eigen::Infinity>());
    rec.T_grid.push_back(T);
    rec.values.push_back(std::move(v));
    rec.bound_estimate.push_back(running);
  }
  return rec;
}

std::vector<double> default_horizon_grid(double tau, double T_max, int count) {
  std::vector<double> grid{tau};
  auto geo = geometric_grid(tau, tau + 1.0, T_max, count);
  grid.insert(grid.end(), geo.begin(), geo.end());
  return grid;
}

CostatePath integrate_adjoint(const ControlProblem& problem, const Trajectory& trajectory,
                              const ControlSignal& control, double T, const Vec& psi_T, double lambda,
                              std::span<const double> tau_grid, const IntegratorSettings& settings) {
  if (!trajectory.covers(T)) throw std::invalid_argument("integrate_adjoint: T outside the trajectory span");
  if (psi_T.size() != problem.state_dim) throw std::invalid_argument("integrate_adjoint: psi_T has wrong size");
  for (double tau : tau_grid) {
    if (tau < trajectory.t_begin() - 1e-12 || tau > T + 1e-12 * std::max(1.0, T)) {
      throw std::invalid_argument("integrate_adjoint: tau_grid must lie in [t0, T]");
    }
  }
  auto make_field = [&, lambda](double lo, double hi) -> Field {
    return [&, lambda, lo, hi](double t, const Vec& psi) {
      const auto [a, gx] = jacobians(problem, trajectory.evaluate(t), control.evaluate_within(t, lo, hi), t);
      return Vec(-(a.transpose() * psi + lambda * gx));
    };
  };
  CostatePath out;
  out.path = integrate_segmented(make_field, T, psi_T, trajectory.t_begin(), control.breakpoints(), settings,
                                 std::nullopt, tau_grid);
  out.lambda = lambda;
  out.terminal_time = T;
  out.terminal_psi = psi_T;
  return out;
}

std::pair<ConditionVerdict, double> check_jx_bounded(const JxRecord& jx) {
  ConditionVerdict v;
  v.tolerance_used = 0.01;
  if (jx.T_grid.size() < 3) {
    v.note = "horizon grid too short for a growth test";
    return {v, jx.bound_estimate.empty() ? 0.0 : jx.bound_estimate.back()};
  }
  const double span = jx.T_grid.back() - jx.tau;
  auto bound_at = [&](double len) {
    double b = 0.0;
    for (std::size_t i = 0; i < jx.T_grid.size(); ++i) {
      if (jx.T_grid[i] - jx.tau <= len * (1.0 + 1e-12)) b = jx.bound_estimate[i];
    }
    return b;
  };
  const double b_full = bound_at(span);
  const double b_half = bound_at(0.5 * span);
  const double b_quarter = bound_at(0.25 * span);
  v.diagnostic_series = {{jx.tau + 0.25 * span, b_quarter}, {jx.tau + 0.5 * span, b_half}, {jx.tau + span, b_full}};
  const double inf = std::numeric_limits<double>::infinity();
  const double g1 = b_half > 0.0 ? b_full / b_half : (b_full > 0.0 ? inf : 1.0);
  const double g2 = b_quarter > 0.0 ? b_half / b_quarter : (b_half > 0.0 ? inf : 1.0);
  std::ostringstream note;
  note << "bound growth per doubling: " << g2 << " then " << g1 << "; M=" << b_full;
  v.note = note.str();
  if (g1 <= 1.01) {
    v.status = Status::holds;
  } else if (g1 >= 1.25 && g2 >= 1.25) {
    v.status = Status::fails;
  } else {
    v.status = Status::inconclusive;
  }
  return {v, b_full};
}

LimitCostate limit_costate(const JxRecord& jx, const TailPolicy& tail) {
  LimitCostate out;
  ConditionVerdict& v = out.verdict;
  v.tolerance_used = tail.converge_tol;
  if (jx.T_grid.size() < 2) {
    v.note = "horizon grid too short";
    return out;
  }
  const double t_hi = jx.T_grid.back();
  const double start = t_hi - tail.window_fraction * (t_hi - jx.tau);
  const auto n = jx.values.front().size();

  Vec mean = Vec::Zero(n);
  Vec osc = Vec::Zero(n);
  std::vector<std::vector<double>> tails(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    std::vector<double> vals;
    for (const auto& val : jx.values) vals.push_back(val[c]);
    const TailStats st = tail_stats(jx.T_grid, vals, start);
    mean[c] = st.mean;
    osc[c] = st.oscillation();
    for (std::size_t i = 0; i < jx.T_grid.size(); ++i) {
      if (jx.T_grid[i] >= start) tails[static_cast<std::size_t>(c)].push_back(vals[i]);
    }
  }
  for (std::size_t i = 0; i < jx.T_grid.size(); ++i) {
    if (jx.T_grid[i] >= start) v.diagnostic_series.emplace_back(jx.T_grid[i], jx.values[i].lpNorm<Eigen::Infinity>());
  }
  std::ostringstream note;
  note << "tail [" << start << ", " << t_hi << "] max oscillation " << osc.maxCoeff();

  if (osc.maxCoeff() < tail.converge_tol) {
    out.psi_hat = mean;
    v.status = Status::holds;
    note << "; converged";
  } else if (check_jx_bounded(jx).first.fails()) {
    v.status = Status::fails;
    note << "; unbounded growth";
  } else {
    bool trend = true;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (osc[c] >= tail.converge_tol && !monotone(tails[static_cast<std::size_t>(c)])) trend = false;
    }
    v.status = trend ? Status::inconclusive : Status::fails;
    note << (trend ? "; monotone trend unresolved" : "; bounded, non-convergent");
  }
  if (jx.truncated) note << "; horizon grid truncated by the trajectory";
  v.note = note.str();
  return out;
}

double lemma1_residual(const ControlProblem& problem, const Trajectory& trajectory, const ControlSignal& control,
                       const CostatePath& costate, std::span<const JxRecord> jx_by_tau, double T,
                       const IntegratorSettings& settings) {
  std::vector<double> taus;
  for (const auto& rec : jx_by_tau) taus.push_back(rec.tau);
  const auto stops = with_extra(taus, {T});
  const TransitionOperator k = transition_matrix(problem, trajectory, control, trajectory.t_begin(), stops, settings);
  if (!costate.path.covers(T)) throw std::invalid_argument("lemma1_residual: costate does not reach T");
  const Vec psi_T = costate.psi(T);
  double worst = 0.0;
  for (const auto& rec : jx_by_tau) {
    if (!costate.path.covers(rec.tau)) throw std::invalid_argument("lemma1_residual: costate does not cover tau");
    const Vec& j = rec.at(T);
    const Vec r = costate.psi(rec.tau) - k.evaluate(T, rec.tau).transpose() * psi_T - costate.lambda * j;
    worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

Vec fd_gradient(const ControlProblem& problem, const ControlSignal& control, double tau, const Vec& x_tau, double T,
                double step, const IntegratorSettings& settings) {
  const int n = problem.state_dim;
  Vec grad = Vec::Zero(n);
  if (T == tau) return grad;
  for (int i = 0; i < n; ++i) {
    double h = step * std::max(1.0, std::abs(x_tau[i]));
    for (int attempt = 0;; ++attempt) {
      Vec xp = x_tau;
      Vec xm = x_tau;
      xp[i] += h;
      xm[i] -= h;
      if (problem.state_domain.contains(xp) && problem.state_domain.contains(xm)) {
        const Trajectory paired = solve_paired_payoff(problem, control, xp, control, xm, tau, T, settings);
        if (!paired.exit_event()) {
          grad[i] = paired_gap(paired, n, T) / (2.0 * h);
          break;
        }
        if (attempt >= 40) {
          const bool plus = paired.exit_event()->component <= n;
          throw NonExtendible("fd_gradient: perturbed trajectory (" + std::string(plus ? "+" : "-") + "e_" +
                                  std::to_string(i) + ") is not extendible to T",
                              *paired.exit_event());
        }
      } else if (attempt >= 40) {
        throw std::domain_error("fd_gradient: no admissible step in component " + std::to_string(i));
      }
      h *= 0.5;
    }
  }
  return grad;
}

ConditionVerdict check_assumption_uniform(const ControlProblem& problem, const ControlSignal& control,
                                          const Trajectory& trajectory, double tau, std::span<const Vec> directions,
                                          std::span<const double> alphas, std::span<const double> T_grid, double tol,
                                          const IntegratorSettings& settings) {
  std::vector<double> grid;
  for (double T : T_grid) {
    if (T >= tau) grid.push_back(T);
  }
  grid = with_extra(grid, {tau});
  const JxRecord jx = accumulate_jx(problem, trajectory, control, tau, grid, settings);
  grid = jx.T_grid;
  const Vec x_tau = trajectory.evaluate(tau);
  const int n = problem.state_dim;

  ConditionVerdict v;
  v.tolerance_used = tol;
  v.status = Status::holds;
  std::ostringstream note;
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const Vec& zeta = directions[d];
    std::vector<double> infs;
    for (double alpha : alphas) {
      const Vec xp = x_tau + alpha * zeta;
      if (!problem.state_domain.contains(xp)) {
        throw std::domain_error("check_assumption_uniform: perturbation leaves the state domain");
      }
      const Trajectory paired = solve_paired_payoff(problem, control, xp, control, x_tau, tau, grid.back(), settings, grid);
      if (paired.exit_event()) {
        throw NonExtendible("check_assumption_uniform: perturbed trajectory is not feasible", *paired.exit_event());
      }
      double inf = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = paired_gap(paired, n, grid[i]) / alpha - jx.values[i].dot(zeta);
        inf = std::min(inf, q);
      }
      infs.push_back(inf);
      v.diagnostic_series.emplace_back(alpha, inf);
    }
    Status s = Status::holds;
    if (!infs.empty() && infs.back() < -tol) {
      bool improving = true;
      for (std::size_t i = 1; i < infs.size(); ++i) {
        if (infs[i] < infs[i - 1]) improving = false;
      }
      s = improving ? Status::inconclusive : Status::fails;
    }
    note << "direction " << d << ": inf at smallest alpha = " << (infs.empty() ? 0.0 : infs.back()) << "; ";
    if (s == Status::fails) {
      v.status = Status::fails;
    } else if (s == Status::inconclusive && v.status == Status::holds) {
      v.status = Status::inconclusive;
    }
  }
  v.note = note.str();
  return v;
}

}  // namespace horizon
