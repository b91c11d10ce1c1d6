#include "horizon/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace horizon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require(const ParamMap& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw std::invalid_argument("missing parameter '" + key + "'");
  }
  if (!std::isfinite(it->second)) {
    throw std::invalid_argument("parameter '" + key + "' is not finite");
  }
  return it->second;
}

Vec vec1(double v) {
  Vec out(1);
  out << v;
  return out;
}

ControlProblem make_ramsey(const ParamMap& params) {
  const double alpha = require(params, "alpha");
  const double delta = require(params, "delta");
  const double theta = require(params, "theta");
  const double k0 = require(params, "k0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ramsey: alpha must lie in (0,1)");
  if (!(delta > 0.0)) throw std::invalid_argument("ramsey: delta must be positive");
  if (!(theta > 0.0)) throw std::invalid_argument("ramsey: theta must be positive");
  if (theta == 1.0) throw std::invalid_argument("ramsey: theta = 1 (log utility) is not supported");
  if (!(k0 > 0.0)) throw std::invalid_argument("ramsey: k0 must be positive");

  const double c_star = (1.0 - alpha) * std::pow(delta / alpha, alpha / (alpha - 1.0));
  double c_max = 10.0 * c_star;
  if (auto it = params.find("c_max"); it != params.end()) {
    c_max = it->second;
    if (!(c_max > 0.0) || !std::isfinite(c_max)) throw std::invalid_argument("ramsey: c_max must be positive");
  }

  ControlProblem p;
  p.name = "ramsey";
  p.state_dim = 1;
  p.control_dim = 1;
  p.dynamics = [alpha, delta](const Vec& x, const Vec& u, double) {
    return vec1(std::pow(x[0], alpha) - delta * x[0] - u[0]);
  };
  p.payoff = [theta](const Vec&, const Vec& u, double) {
    return std::pow(u[0], 1.0 - theta) / (1.0 - theta);
  };
  p.dynamics_jac_x = [alpha, delta](const Vec& x, const Vec&, double) {
    Mat a(1, 1);
    a(0, 0) = alpha * std::pow(x[0], alpha - 1.0) - delta;
    return a;
  };
  p.payoff_grad_x = [](const Vec&, const Vec&, double) { return Vec::Zero(1).eval(); };
  p.control_set = ControlSet::box(vec1(0.0), vec1(c_max), {true});
  p.state_domain = Box::make(vec1(0.0), vec1(kInf));
  p.initial_state = vec1(k0);
  p.initial_time = 0.0;
  p.params = {{"alpha", alpha}, {"delta", delta}, {"theta", theta}, {"k0", k0}, {"c_max", c_max}};
  return p;
}

ControlProblem make_integrator(const ParamMap& params) {
  const double rho = require(params, "rho");
  if (!(rho >= 0.0)) throw std::invalid_argument("integrator: rho must be non-negative");

  ControlProblem p;
  p.name = "integrator";
  p.state_dim = 1;
  p.control_dim = 1;
  p.dynamics = [](const Vec&, const Vec& u, double) { return vec1(u[0]); };
  p.payoff = [rho](const Vec& x, const Vec&, double t) { return std::exp(-rho * t) * x[0]; };
  p.dynamics_jac_x = [](const Vec&, const Vec&, double) { return Mat::Zero(1, 1).eval(); };
  p.payoff_grad_x = [rho](const Vec&, const Vec&, double t) { return vec1(std::exp(-rho * t)); };
  p.control_set = ControlSet::box(vec1(0.0), vec1(1.0));
  p.state_domain = Box::unbounded(1);
  p.initial_state = vec1(0.0);
  p.initial_time = 0.0;
  p.params = {{"rho", rho}};
  return p;
}

ControlProblem make_oscillator(const ParamMap& params) {
  const double b = require(params, "b");
  if (!(b > 0.0)) throw std::invalid_argument("oscillator: b must be positive");

  ControlProblem p;
  p.name = "oscillator";
  p.state_dim = 2;
  p.control_dim = 1;
  p.dynamics = [](const Vec& x, const Vec& u, double) {
    Vec v(2);
    v << x[1], u[0] - x[0];
    return v;
  };
  p.payoff = [b](const Vec& x, const Vec& u, double) { return x[1] + b * u[0]; };
  p.dynamics_jac_x = [](const Vec&, const Vec&, double) {
    Mat a(2, 2);
    a << 0.0, 1.0, -1.0, 0.0;
    return a;
  };
  p.payoff_grad_x = [](const Vec&, const Vec&, double) {
    Vec g(2);
    g << 0.0, 1.0;
    return g;
  };
  p.control_set = ControlSet::box(vec1(-1.0), vec1(1.0));
  p.state_domain = Box::unbounded(2);
  p.initial_state = Vec::Zero(2);
  p.initial_time = 0.0;
  p.params = {{"b", b}};
  return p;
}

}  // namespace

Box Box::unbounded(int n) {
  return Box{Vec::Constant(n, -kInf), Vec::Constant(n, kInf)};
}

Box Box::make(Vec lower, Vec upper) {
  if (lower.size() != upper.size()) throw std::invalid_argument("Box: bound dimensions differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw std::invalid_argument("Box: empty open box");
  }
  return Box{std::move(lower), std::move(upper)};
}

bool Box::contains(const Vec& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
  }
  return true;
}

double Box::distance_to_boundary(const Vec& x) const {
  double d = kInf;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::isfinite(lower[i])) d = std::min(d, std::abs(x[i] - lower[i]));
    if (std::isfinite(upper[i])) d = std::min(d, std::abs(upper[i] - x[i]));
  }
  return d;
}

std::pair<int, bool> Box::nearest_face(const Vec& x) const {
  double d = kInf;
  std::pair<int, bool> face{-1, false};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::isfinite(lower[i]) && std::abs(x[i] - lower[i]) < d) {
      d = std::abs(x[i] - lower[i]);
      face = {static_cast<int>(i), false};
    }
    if (std::isfinite(upper[i]) && std::abs(upper[i] - x[i]) < d) {
      d = std::abs(upper[i] - x[i]);
      face = {static_cast<int>(i), true};
    }
  }
  return face;
}

Box Box::stacked(const Box& other) const {
  Vec lo(dim() + other.dim());
  Vec hi(dim() + other.dim());
  lo << lower, other.lower;
  hi << upper, other.upper;
  return Box{lo, hi};
}

ControlSet ControlSet::box(Vec lower, Vec upper, std::vector<bool> lower_open) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw std::invalid_argument("ControlSet::box: bad dimensions");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw std::invalid_argument("ControlSet::box: lower > upper");
  }
  if (lower_open.empty()) lower_open.assign(static_cast<std::size_t>(lower.size()), false);
  if (lower_open.size() != static_cast<std::size_t>(lower.size())) {
    throw std::invalid_argument("ControlSet::box: lower_open size mismatch");
  }
  ControlSet s;
  s.kind_ = Kind::box;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  s.lower_open_ = std::move(lower_open);
  return s;
}

ControlSet ControlSet::finite(std::vector<Vec> members) {
  if (members.empty()) throw std::invalid_argument("ControlSet::finite: empty member list");
  for (const auto& m : members) {
    if (m.size() != members.front().size()) throw std::invalid_argument("ControlSet::finite: ragged members");
  }
  ControlSet s;
  s.kind_ = Kind::finite;
  s.members_ = std::move(members);
  return s;
}

int ControlSet::dim() const {
  return kind_ == Kind::box ? static_cast<int>(lower_.size()) : static_cast<int>(members_.front().size());
}

bool ControlSet::contains(const Vec& u, double tol) const {
  if (u.size() != dim()) return false;
  if (kind_ == Kind::finite) {
    return std::any_of(members_.begin(), members_.end(),
                       [&](const Vec& m) { return (m - u).lpNorm<Eigen::Infinity>() <= tol; });
  }
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const bool above = lower_open_[static_cast<std::size_t>(i)] ? u[i] > lower_[i] : u[i] >= lower_[i] - tol;
    if (!above || u[i] > upper_[i] + tol) return false;
  }
  return true;
}

std::vector<Vec> ControlSet::sample_grid(int resolution) const {
  if (kind_ == Kind::finite) return members_;
  const int res = std::max(resolution, 2);
  const auto n = static_cast<int>(lower_.size());
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& axis = axes[static_cast<std::size_t>(i)];
    const double lo = lower_[i];
    const double hi = upper_[i];
    if (lo == hi) {
      axis.push_back(lo);
      continue;
    }
    for (int k = 0; k < res; ++k) {
      axis.push_back(k == res - 1 ? hi : lo + (hi - lo) * k / (res - 1));
    }
    if (lower_open_[static_cast<std::size_t>(i)]) axis.front() = lo + 1e-9 * (hi - lo);
  }
  std::vector<Vec> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = axes[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    out.push_back(u);
    int d = n - 1;
    while (d >= 0) {
      auto& k = idx[static_cast<std::size_t>(d)];
      if (++k < axes[static_cast<std::size_t>(d)].size()) break;
      k = 0;
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

void MultiplierPair::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("multiplier lambda must be non-negative");
  if (lambda == 0.0 && (psi0.size() == 0 || psi0.isZero(0.0))) {
    throw std::invalid_argument("multipliers (lambda, psi0) must not vanish together");
  }
}

BuiltinExample parse_example(const std::string& name) {
  if (name == "ramsey") return BuiltinExample::ramsey;
  if (name == "integrator") return BuiltinExample::integrator;
  if (name == "oscillator") return BuiltinExample::oscillator;
  throw std::invalid_argument("unknown example '" + name + "'");
}

std::string to_string(BuiltinExample e) {
  switch (e) {
    case BuiltinExample::ramsey: return "ramsey";
    case BuiltinExample::integrator: return "integrator";
    case BuiltinExample::oscillator: return "oscillator";
  }
  return "unknown";
}

ControlProblem make_builtin_problem(BuiltinExample name, const ParamMap& params) {
  switch (name) {
    case BuiltinExample::ramsey: return make_ramsey(params);
    case BuiltinExample::integrator: return make_integrator(params);
    case BuiltinExample::oscillator: return make_oscillator(params);
  }
  throw std::invalid_argument("unknown example");
}

ControlProblem make_builtin_problem(const std::string& name, const ParamMap& params) {
  return make_builtin_problem(parse_example(name), params);
}

double default_fd_step(double xi, double h) { return std::max(h, h * std::abs(xi)); }

std::pair<Mat, Vec> fd_jacobians(const ControlProblem& problem, const Vec& x, const Vec& u, double t, double h) {
  const int n = problem.state_dim;
  Mat a(n, n);
  Vec g(n);
  for (int i = 0; i < n; ++i) {
    double step = default_fd_step(x[i], h);
    Vec xp = x;
    Vec xm = x;
    while (true) {
      xp[i] = x[i] + step;
      xm[i] = x[i] - step;
      if (problem.state_domain.contains(xp) && problem.state_domain.contains(xm)) break;
      step *= 0.5;
      if (step < 1e-14) {
        throw std::domain_error("finite-difference stencil leaves the state domain in component " +
                                std::to_string(i));
      }
    }
    a.col(i) = (problem.dynamics(xp, u, t) - problem.dynamics(xm, u, t)) / (2.0 * step);
    g[i] = (problem.payoff(xp, u, t) - problem.payoff(xm, u, t)) / (2.0 * step);
  }
  return {a, g};
}

std::pair<Mat, Vec> jacobians(const ControlProblem& problem, const Vec& x, const Vec& u, double t, double h) {
  if (problem.dynamics_jac_x && problem.payoff_grad_x) {
    return {problem.dynamics_jac_x(x, u, t), problem.payoff_grad_x(x, u, t)};
  }
  auto fd = fd_jacobians(problem, x, u, t, h);
  if (problem.dynamics_jac_x) fd.first = problem.dynamics_jac_x(x, u, t);
  if (problem.payoff_grad_x) fd.second = problem.payoff_grad_x(x, u, t);
  return fd;
}

double hamiltonian(const ControlProblem& problem, const Vec& x, const Vec& u, double t, const Vec& psi,
                   double lambda) {
  const double value = lambda * problem.payoff(x, u, t) + psi.dot(problem.dynamics(x, u, t));
  if (!std::isfinite(value)) {
    throw std::domain_error("non-finite Hamiltonian value at t=" + std::to_string(t));
  }
  return value;
}

}  // namespace horizon
