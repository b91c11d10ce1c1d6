#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace horizon {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using ParamMap = std::map<std::string, double>;

/// Open axis-aligned box; infinite bounds are allowed.
struct Box {
  Vec lower;
  Vec upper;

  static Box unbounded(int n);
  static Box make(Vec lower, Vec upper);

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] bool contains(const Vec& x) const;
  /// Distance to the nearest finite face, +inf if all faces are infinite.
  [[nodiscard]] double distance_to_boundary(const Vec& x) const;
  /// Index and side of the face nearest to x: (component, is_upper).
  [[nodiscard]] std::pair<int, bool> nearest_face(const Vec& x) const;
  /// Box over the concatenation of two states.
  [[nodiscard]] Box stacked(const Box& other) const;
};

class ControlSet {
 public:
  enum class Kind { box, finite };

  /// Box control set. `lower_open` marks components whose lower bound is excluded.
  static ControlSet box(Vec lower, Vec upper, std::vector<bool> lower_open = {});
  static ControlSet finite(std::vector<Vec> members);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int dim() const;
  [[nodiscard]] bool contains(const Vec& u, double tol = 1e-12) const;

  /// Tensor grid with `resolution` points per box dimension (vertices always
  /// included), or every member of a finite set. Excluded lower bounds are
  /// replaced by the closest admissible point lower + 1e-9 * (upper - lower).
  [[nodiscard]] std::vector<Vec> sample_grid(int resolution) const;

  [[nodiscard]] const Vec& lower() const { return lower_; }
  [[nodiscard]] const Vec& upper() const { return upper_; }
  [[nodiscard]] const std::vector<Vec>& members() const { return members_; }

 private:
  Kind kind_ = Kind::box;
  Vec lower_;
  Vec upper_;
  std::vector<bool> lower_open_;
  std::vector<Vec> members_;
};

using DynamicsFn = std::function<Vec(const Vec& x, const Vec& u, double t)>;
using PayoffFn = std::function<double(const Vec& x, const Vec& u, double t)>;
using JacobianFn = std::function<Mat(const Vec& x, const Vec& u, double t)>;
using GradientFn = std::function<Vec(const Vec& x, const Vec& u, double t)>;

/// x' = f(x, u, t), payoff rate g(x, u, t), x in an open box X, u in U.
/// Values are immutable after construction and safe to share.
struct ControlProblem {
  std::string name;
  int state_dim = 0;
  int control_dim = 0;
  DynamicsFn dynamics;
  PayoffFn payoff;
  JacobianFn dynamics_jac_x;  // optional
  GradientFn payoff_grad_x;   // optional
  ControlSet control_set;
  Box state_domain;
  Vec initial_state;
  double initial_time = 0.0;
  ParamMap params;
};

struct MultiplierPair {
  double lambda = 1.0;
  Vec psi0;

  /// Throws std::invalid_argument for lambda < 0 or (lambda, psi0) == 0.
  void validate() const;
};

enum class BuiltinExample { ramsey, integrator, oscillator };

BuiltinExample parse_example(const std::string& name);
std::string to_string(BuiltinExample e);

/// Builds one of the three reference problems.
///   ramsey:     alpha in (0,1), delta > 0, theta > 0 (theta != 1), k0 > 0, optional c_max
///   integrator: rho >= 0
///   oscillator: b > 0
/// Unknown keys are ignored; missing or out-of-range values throw std::invalid_argument.
ControlProblem make_builtin_problem(BuiltinExample name, const ParamMap& params);
ControlProblem make_builtin_problem(const std::string& name, const ParamMap& params);

/// Default central-difference step for component value xi.
double default_fd_step(double xi, double h = 1e-6);

/// (df/dx, dg/dx) at a point: analytic when supplied, otherwise central
/// differences with per-component step max(h, h*|x_i|). Steps that leave the
/// state domain are halved; throws std::domain_error below 1e-14.
std::pair<Mat, Vec> jacobians(const ControlProblem& problem, const Vec& x, const Vec& u, double t,
                              double h = 1e-6);

/// Finite-difference (df/dx, dg/dx) regardless of analytic availability.
std::pair<Mat, Vec> fd_jacobians(const ControlProblem& problem, const Vec& x, const Vec& u, double t,
                                 double h = 1e-6);

/// lambda * g(x,u,t) + <psi, f(x,u,t)>. Throws std::domain_error when non-finite.
double hamiltonian(const ControlProblem& problem, const Vec& x, const Vec& u, double t, const Vec& psi,
                   double lambda);

}  // namespace horizon
