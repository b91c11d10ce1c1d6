#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "horizon/control_signal.hpp"
#include "horizon/ode.hpp"
#include "horizon/problem.hpp"
#include "horizon/variational.hpp"
#include "horizon/verdict.hpp"

namespace horizon {

/// H(x(tau), u, tau, J_x(tau, T), 1) - H(x(tau), u_hat(tau), tau, J_x(tau, T), 1).
double delta_hamiltonian(const ControlProblem& problem, const Trajectory& trajectory, const ControlSignal& control,
                         const JxRecord& jx, const Vec& u, double tau, double T);

enum class GeneralMode { woo, oo };

std::string to_string(GeneralMode m);

struct GeneralCell {
  double tau = 0.0;
  Vec u;
  double estimate = 0.0;               // liminf (woo) or limsup (oo) estimate
  std::array<double, 3> windows{};     // newest window first
  Status status = Status::inconclusive;
};

struct GeneralConditionReport {
  std::vector<double> tau_grid;
  std::vector<Vec> control_grid;
  GeneralMode mode = GeneralMode::woo;
  double tolerance = 1e-6;
  std::vector<GeneralCell> cells;
  ConditionVerdict verdict;

  /// Cell for (tau_grid[i], control_grid[j]).
  [[nodiscard]] const GeneralCell& cell(std::size_t i, std::size_t j) const {
    return cells[i * control_grid.size() + j];
  }
};

/// Estimates liminf (woo) or limsup (oo) over T of delta_hamiltonian for every
/// (tau, u) pair. Each estimate is the min/max over the trailing windows
/// T - tau in [L/2, L], [L/4, L/2], [L/8, L/4] with L = max(T_grid) - tau.
GeneralConditionReport check_general(const ControlProblem& problem, const Trajectory& trajectory,
                                     const ControlSignal& control, std::span<const double> tau_grid,
                                     std::span<const Vec> control_grid, std::span<const double> T_grid,
                                     GeneralMode mode, double tol = 1e-6,
                                     const IntegratorSettings& settings = precise_settings());

GeneralConditionReport check_general(const ControlProblem& problem, const Trajectory& trajectory,
                                     const ControlSignal& control, std::span<const double> tau_grid,
                                     int control_resolution, std::span<const double> T_grid, GeneralMode mode,
                                     double tol = 1e-6, const IntegratorSettings& settings = precise_settings());

struct ClassicalReport {
  ConditionVerdict psi_to_zero;        // |psi(t)| -> 0
  ConditionVerdict state_costate;      // <x(t), psi(t)> -> 0
  ConditionVerdict hamiltonian;        // H(x, u, t, psi, lambda) -> 0
  ConditionVerdict transported;        // |K*(t, t0) psi(t)| -> 0
};

/// The four classical transversality limits on the trailing window of the
/// range covered by both the trajectory and the costate.
ClassicalReport check_classical(const ControlProblem& problem, const Trajectory& trajectory,
                                const ControlSignal& control, const CostatePath& costate, double lambda,
                                const TransitionOperator& transition, const TailPolicy& tail = {},
                                int samples = 4001);

/// Pointwise maximum condition on a sampled control set; diagnostic series is
/// (t, max_u H - H(u_hat)).
ConditionVerdict check_max_principle(const ControlProblem& problem, const Trajectory& trajectory,
                                     const ControlSignal& control, const CostatePath& costate, double lambda,
                                     int control_resolution, std::span<const double> time_grid, double tol = 1e-6);

struct CostateDecomposition {
  std::optional<Vec> a0;
  double residual = 0.0;  // NaN when a0 does not exist
  ConditionVerdict verdict;
};

/// a0 = lim K*(T, t0) psi(T) estimated on the costate tail, and the residual
/// max over the records' tau of |psi(tau) - K*(t0, tau) a0 - lambda psi_hat(tau)|.
CostateDecomposition decompose_costate(const CostatePath& costate, const TransitionOperator& transition,
                                       std::span<const JxRecord> jx_by_tau, double lambda,
                                       const TailPolicy& tail = {}, int samples = 4001);

struct GmaxCandidate {
  Trajectory trajectory;
  ControlSignal control;
};

/// Pointwise payoff maximization over the family: for every sampled t a
/// candidate holds when no other feasible candidate passing through the same
/// state attains a larger payoff rate there. Candidates that leave the state
/// domain are infeasible and fail. Scalar states only; throws when the payoff
/// depends on the state.
std::vector<ConditionVerdict> check_gmax(const ControlProblem& problem, std::span<const GmaxCandidate> candidates,
                                         std::span<const double> time_grid, double tol = 1e-9);

}  // namespace horizon
