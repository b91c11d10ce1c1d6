#pragma once

#include <optional>
#include <span>
#include <vector>

#include "horizon/control_signal.hpp"
#include "horizon/ode.hpp"
#include "horizon/problem.hpp"
#include "horizon/verdict.hpp"

namespace horizon {

/// State-transition matrix K(t, tau) of y' = (df/dx)(x(t), u(t), t) y along a
/// base trajectory. Internally holds Phi(t) = K(t, anchor) over the whole
/// trajectory span, so K(t, s) = Phi(t) Phi(s)^{-1}.
class TransitionOperator {
 public:
  TransitionOperator(Trajectory base_trajectory, ControlSignal base_control, double anchor, Trajectory phi, int n);

  [[nodiscard]] Mat evaluate(double t, double tau) const;
  /// Y(t) = K(t, t0) with t0 the start of the base trajectory.
  [[nodiscard]] Mat fundamental(double t) const;

  [[nodiscard]] double anchor() const { return anchor_; }
  [[nodiscard]] double t0() const { return base_trajectory_.t_begin(); }
  [[nodiscard]] double t_end() const { return phi_.t_end(); }
  [[nodiscard]] const Trajectory& base_trajectory() const { return base_trajectory_; }
  [[nodiscard]] const ControlSignal& base_control() const { return base_control_; }

 private:
  [[nodiscard]] Mat phi(double t) const;

  Trajectory base_trajectory_;
  ControlSignal base_control_;
  double anchor_;
  Trajectory phi_;
  int n_;
};

/// Integrates the variational equation from the identity at tau, forward to
/// the end and backward to the start of the trajectory. t_grid entries become
/// step boundaries (exact samples there).
TransitionOperator transition_matrix(const ControlProblem& problem, const Trajectory& trajectory,
                                     const ControlSignal& control, double tau, std::span<const double> t_grid = {},
                                     const IntegratorSettings& settings = precise_settings());

/// J_x(tau, T) = integral_tau^T K*(t, tau) dg/dx dt over a horizon grid.
struct JxRecord {
  double tau = 0.0;
  std::vector<double> T_grid;
  std::vector<Vec> values;
  std::vector<double> bound_estimate;  // running max of |J_x| (max-norm)
  bool truncated = false;              // trajectory ended before max(T_grid)

  [[nodiscard]] std::size_t index_of(double T) const;  // throws when T is not on the grid
  [[nodiscard]] const Vec& at(double T) const { return values[index_of(T)]; }
};

/// One forward pass of the augmented system [vec K(t, tau), J_x].
JxRecord accumulate_jx(const ControlProblem& problem, const Trajectory& trajectory, const ControlSignal& control,
                       double tau, std::span<const double> T_grid,
                       const IntegratorSettings& settings = precise_settings());

/// Horizon grid used for J_x tails: tau, then geometric from tau + 1 to T_max.
std::vector<double> default_horizon_grid(double tau, double T_max, int count = 200);

struct CostatePath {
  Trajectory path;
  double lambda = 1.0;
  double terminal_time = 0.0;
  Vec terminal_psi;

  [[nodiscard]] Vec psi(double t) const { return path.evaluate(t); }
};

/// Backward integration of -psi' = (df/dx)^T psi + lambda dg/dx from psi(T) = psi_T
/// down to the start of the trajectory.
CostatePath integrate_adjoint(const ControlProblem& problem, const Trajectory& trajectory,
                              const ControlSignal& control, double T, const Vec& psi_T, double lambda,
                              std::span<const double> tau_grid = {},
                              const IntegratorSettings& settings = precise_settings());

/// Candidate costate psi_hat(tau) = lim_{T->inf} J_x(tau, T).
struct LimitCostate {
  std::optional<Vec> psi_hat;
  ConditionVerdict verdict;
};

LimitCostate limit_costate(const JxRecord& jx, const TailPolicy& tail = {});

/// Growth test on the running bound of |J_x|. Holds when the bound grows by at
/// most 1% over the last doubling of T - tau; fails when it grows by at least
/// 25% over each of the last two doublings.
std::pair<ConditionVerdict, double> check_jx_bounded(const JxRecord& jx);

/// max over the records' tau of |psi(tau) - K*(T, tau) psi(T) - lambda J_x(tau, T)|.
double lemma1_residual(const ControlProblem& problem, const Trajectory& trajectory, const ControlSignal& control,
                       const CostatePath& costate, std::span<const JxRecord> jx_by_tau, double T,
                       const IntegratorSettings& settings = precise_settings());

class NonExtendible : public std::runtime_error {
 public:
  NonExtendible(const std::string& what, ExitEvent event) : std::runtime_error(what), event_(std::move(event)) {}
  [[nodiscard]] const ExitEvent& event() const { return event_; }

 private:
  ExitEvent event_;
};

/// Central-difference gradient of J(u, x_tau, tau, T) in x_tau with the
/// control held fixed; independent oracle for J_x.
Vec fd_gradient(const ControlProblem& problem, const ControlSignal& control, double tau, const Vec& x_tau, double T,
                double step = 1e-3, const IntegratorSettings& settings = precise_settings());

/// Uniform lower-bound check for initial-state perturbations: for each alpha,
/// inf over T of (J(x+alpha zeta) - J(x)) / alpha - <J_x(tau, T), zeta>.
/// The diagnostic series is (alpha, infimum) for every direction in turn.
ConditionVerdict check_assumption_uniform(const ControlProblem& problem, const ControlSignal& control,
                                          const Trajectory& trajectory, double tau, std::span<const Vec> directions,
                                          std::span<const double> alphas, std::span<const double> T_grid,
                                          double tol = 1e-6,
                                          const IntegratorSettings& settings = precise_settings());

}  // namespace horizon
