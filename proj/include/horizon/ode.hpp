#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "horizon/problem.hpp"

namespace horizon {

enum class Method { rk4_fixed, rk45_adaptive };

struct IntegratorSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.5;
  Method method = Method::rk45_adaptive;

  void validate() const;
};

/// Tighter settings used by the sensitivity and payoff-difference routines.
IntegratorSettings precise_settings();

struct ExitEvent {
  double time = 0.0;
  int component = -1;
  bool upper = false;
  std::string description;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampled solution with cubic Hermite dense output. Nodes are stored with
/// increasing time regardless of integration direction. Duplicate node times
/// mark derivative jumps (control breakpoints).
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<double> times, std::vector<Vec> states, std::vector<Vec> derivatives,
             std::optional<ExitEvent> exit_event = std::nullopt);

  [[nodiscard]] bool empty() const { return times_.empty(); }
  [[nodiscard]] int dim() const { return states_.empty() ? 0 : static_cast<int>(states_.front().size()); }
  [[nodiscard]] double t_begin() const { return times_.front(); }
  [[nodiscard]] double t_end() const { return times_.back(); }
  [[nodiscard]] bool covers(double t) const;

  /// Dense evaluation; node times return the stored state exactly.
  [[nodiscard]] Vec evaluate(double t) const;
  /// Time derivative of the interpolant.
  [[nodiscard]] Vec evaluate_derivative(double t) const;

  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] const std::vector<Vec>& states() const { return states_; }
  [[nodiscard]] const std::vector<Vec>& derivatives() const { return derivatives_; }
  [[nodiscard]] const std::optional<ExitEvent>& exit_event() const { return exit_event_; }

  /// Joins pieces that share endpoints; the exit event of any piece is kept.
  static Trajectory concatenate(std::vector<Trajectory> pieces);

 private:
  [[nodiscard]] std::size_t interval(double t) const;

  std::vector<double> times_;
  std::vector<Vec> states_;
  std::vector<Vec> derivatives_;
  std::optional<ExitEvent> exit_event_;
};

using Field = std::function<Vec(double t, const Vec& y)>;

/// Integrates y' = field(t, y) from t0 to t_end (t_end < t0 integrates
/// backward through time reversal of the field). `stops` are forced step
/// boundaries. When `domain` is given the solution stops at the first boundary
/// crossing, localized by bisection, and the trajectory carries an exit event.
/// Throws IntegrationError on step-size underflow or a non-finite field value
/// inside the domain.
Trajectory integrate(const Field& field, double t0, const Vec& y0, double t_end, const IntegratorSettings& settings,
                     const std::optional<Box>& domain = std::nullopt, std::span<const double> stops = {});

/// Builds the field for one open segment (lo, hi) between breakpoints.
using SegmentFieldFactory = std::function<Field(double lo, double hi)>;

/// Integrates piece by piece between the given breakpoints, so that fields
/// with jumps at the breakpoints are only evaluated on one side of each jump.
Trajectory integrate_segmented(const SegmentFieldFactory& make_field, double t0, const Vec& y0, double t_end,
                               std::span<const double> breakpoints, const IntegratorSettings& settings,
                               const std::optional<Box>& domain = std::nullopt, std::span<const double> stops = {});

}  // namespace horizon
