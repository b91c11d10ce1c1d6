#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "horizon/control_signal.hpp"
#include "horizon/ode.hpp"
#include "horizon/problem.hpp"

namespace horizon {

// ---------------------------------------------------------------- Ramsey

struct RamseyParams {
  double alpha = 0.4;
  double delta = 0.05;
  double theta = 0.5;
  double k0 = 10.0;

  /// Throws std::invalid_argument for alpha outside (0,1), delta <= 0,
  /// theta <= 0, theta == 1 or k0 <= 0.
  void validate() const;
  static RamseyParams from(const ParamMap& params);
  [[nodiscard]] ParamMap to_params() const;
};

enum class SteadyKind { interior_saddle, zero_consumption };

struct SteadyState {
  double k_star = 0.0;
  double c_star = 0.0;
  SteadyKind kind = SteadyKind::interior_saddle;
};

struct RamseySteadyStates {
  SteadyState interior;
  SteadyState zero_consumption;
};

RamseySteadyStates ramsey_steady_state(const RamseyParams& p);

/// (k^alpha - delta k - c, c (alpha k^(alpha-1) - delta) / theta); throws
/// std::domain_error for k <= 0 or c <= 0.
Eigen::Vector2d ramsey_field(const RamseyParams& p, double k, double c);

/// Slope dc/dk of the stable eigenvector of the linearized field at (k*, c*).
double ramsey_stable_slope(const RamseyParams& p);

enum class RamseyClass { saddle, hits_zero_capital, to_zero_consumption, inconclusive };

std::string to_string(RamseyClass c);

struct RamseySettings {
  double T_max = 2000.0;
  double ball_radius = 1e-3;
  double c0_tol = 1e-10;
  int max_iterations = 60;
  double chunk = 25.0;  // classification looks at the path every `chunk` time units
  IntegratorSettings integrator = precise_settings();
};

struct RamseyPath {
  RamseyClass cls = RamseyClass::inconclusive;
  double decided_at = 0.0;  // time at which the class became certain
  Trajectory path;          // (k, c)
};

/// Integrates the (k, c) field from (k0, c0). With use_ball = false the
/// 1e-3 ball is ignored and the path is followed until it settles on one side.
RamseyPath ramsey_classify_path(const RamseyParams& p, double k0, double c0, const RamseySettings& settings = {},
                                bool use_ball = true);

RamseyClass ramsey_classify(const RamseyParams& p, double k0, double c0, const RamseySettings& settings = {});

struct ShootResult {
  double c0 = 0.0;
  int iterations = 0;
  double ball_entry_time = 0.0;
  Trajectory trajectory;   // (k, c) on [0, T_max]
  ControlSignal control;   // c(t) along the trajectory
  std::vector<std::pair<double, double>> bracket_history;  // (lower, upper) per iteration
};

/// Bisection on c0 for the saddle path from p.k0. Past the entry into the
/// ball the path follows the linear stable direction through the entry point.
/// Throws std::runtime_error when no bracket is found or the result misses
/// the ball.
ShootResult ramsey_shoot(const RamseyParams& p, const RamseySettings& settings = {});

/// (k, c) path of the state and Euler equations from (k0, c0) up to T_max or
/// until it leaves k, c > 0.
Trajectory ramsey_euler_path(const RamseyParams& p, double k0, double c0, double T_max,
                             const IntegratorSettings& settings = precise_settings());

/// Control signal c(t) read off a (k, c) path; held constant past its end.
ControlSignal ramsey_path_control(const Trajectory& path);

// ------------------------------------------------------------ oscillator

/// Closed forms for x1' = x2, x2' = u - x1, payoff x2 + b u, u_hat = 1, x(0) = 0.
class OscillatorReference {
 public:
  explicit OscillatorReference(double b);

  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] Mat K(double t, double tau) const;
  [[nodiscard]] Vec x_hat(double t) const;
  /// Maximizing multipliers; throws std::invalid_argument when |r| > b.
  [[nodiscard]] Vec psi(double r, double phi, double t) const;
  [[nodiscard]] Vec jx(double tau, double T) const;
  [[nodiscard]] double delta_h(double u, double tau, double T) const;
  /// H along (x_hat, 1, psi(r, phi), 1), constant in t.
  [[nodiscard]] double hamiltonian_along(double r, double phi) const;
  /// K*(t, 0) psi(t).
  [[nodiscard]] Vec transported(double r, double phi, double t) const;
  /// J(challenger) - J(u_hat) for the challenger u = 0 on [0, s], 1 afterwards.
  [[nodiscard]] double delayed_start_gap(double s, double T) const;

 private:
  double b_;
};

// ------------------------------------------------------------ integrator

/// x' = u, payoff e^(-rho t) x, u in [0, 1], u_hat = 1.
struct IntegratorReference {
  double rho = 0.1;
  double a0 = 0.0;
  double lambda = 1.0;

  IntegratorReference(double rho, double a0, double lambda);

  /// a0 + lambda e^(-rho t) / rho, or a0 - lambda t when rho = 0.
  [[nodiscard]] double psi(double t) const;
  /// lambda e^(-rho t) / rho; nullopt when the limit diverges (rho = 0, lambda > 0).
  [[nodiscard]] std::optional<double> psi_hat(double t) const;
  [[nodiscard]] bool psi_hat_diverges() const { return rho == 0.0 && lambda > 0.0; }
  /// psi(t) >= 0 for every t >= 0, which is where u_hat = 1 maximizes H.
  [[nodiscard]] bool max_principle_holds() const;
};

}  // namespace horizon
