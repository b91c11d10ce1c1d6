#include <doctest.h>

#include <cmath>
#include <random>

#include "horizon/problem.hpp"

using namespace horizon;

namespace {

Vec v1(double a) {
  Vec x(1);
  x << a;
  return x;
}

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

ParamMap ramsey_params() { return {{"alpha", 0.4}, {"delta", 0.05}, {"theta", 0.5}, {"k0", 10.0}}; }

}  // namespace

TEST_CASE("ramsey builtin evaluates the capital equation and CRRA payoff") {
  const ControlProblem p = make_builtin_problem("ramsey", ramsey_params());
  CHECK(p.state_dim == 1);
  CHECK(p.dynamics(v1(32.0), v1(2.4), 0.0)[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.dynamics(v1(1.0), v1(1.0), 0.0)[0] == doctest::Approx(-0.05));
  CHECK(p.payoff(v1(5.0), v1(4.0), 0.0) == doctest::Approx(4.0));  // c^0.5 / 0.5
  CHECK(p.params.at("c_max") == doctest::Approx(24.0));
  CHECK_FALSE(p.state_domain.contains(v1(0.0)));
  CHECK_FALSE(p.control_set.contains(v1(0.0)));
  CHECK(p.control_set.contains(v1(1e-12)));
}

TEST_CASE("builtin parameters are validated") {
  auto bad = ramsey_params();
  bad["theta"] = 1.0;
  CHECK_THROWS_AS(make_builtin_problem("ramsey", bad), std::invalid_argument);
  bad = ramsey_params();
  bad.erase("alpha");
  CHECK_THROWS_AS(make_builtin_problem("ramsey", bad), std::invalid_argument);
  bad = ramsey_params();
  bad["alpha"] = 1.0;
  CHECK_THROWS_AS(make_builtin_problem("ramsey", bad), std::invalid_argument);
  CHECK_THROWS_AS(make_builtin_problem("integrator", {{"rho", -0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_builtin_problem("oscillator", {{"b", 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_builtin_problem("pendulum", {}), std::invalid_argument);
  CHECK_NOTHROW(make_builtin_problem("integrator", {{"rho", 0.0}, {"unused", 3.0}}));
}

TEST_CASE("analytic jacobians agree with central differences at random probes") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<ControlProblem> problems{make_builtin_problem("ramsey", ramsey_params()),
                                             make_builtin_problem("integrator", {{"rho", 0.1}}),
                                             make_builtin_problem("oscillator", {{"b", 0.5}})};
  for (const auto& p : problems) {
    for (int i = 0; i < 100; ++i) {
      Vec x(p.state_dim);
      for (int j = 0; j < p.state_dim; ++j) x[j] = p.name == "ramsey" ? 0.5 + 100.0 * unit(rng) : 10.0 * unit(rng) - 5.0;
      const Vec lo = p.control_set.lower();
      const Vec hi = p.control_set.upper();
      const Vec u = lo + (hi - lo) * (0.01 + 0.98 * unit(rng));
      const double t = 20.0 * unit(rng);
      const auto [a, gx] = jacobians(p, x, u, t);
      const auto [fa, fgx] = fd_jacobians(p, x, u, t);
      CHECK((a - fa).lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, a.lpNorm<Eigen::Infinity>()));
      CHECK((gx - fgx).lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, gx.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("finite-difference jacobian shrinks its step near the domain boundary") {
  const ControlProblem p = make_builtin_problem("ramsey", ramsey_params());
  const double k = 5e-7;
  const auto [a, gx] = fd_jacobians(p, v1(k), v1(0.1), 0.0);
  CHECK(std::isfinite(a(0, 0)));
  CHECK(a(0, 0) > 0.0);
  CHECK(gx[0] == doctest::Approx(0.0));
  const double away = 0.4 * std::pow(2.0, -0.6) - 0.05;
  CHECK(fd_jacobians(p, v1(2.0), v1(0.1), 0.0).first(0, 0) == doctest::Approx(away).epsilon(1e-8));
}

TEST_CASE("hamiltonian is affine in the multipliers") {
  const ControlProblem p = make_builtin_problem("oscillator", {{"b", 0.5}});
  const Vec x = v2(0.3, -1.2);
  const Vec u = v1(0.4);
  const Vec psi1 = v2(1.0, 2.0);
  const Vec psi2 = v2(-0.5, 0.25);
  const double lhs = hamiltonian(p, x, u, 1.0, psi1 + psi2, 1.0);
  const double rhs = hamiltonian(p, x, u, 1.0, psi1, 0.25) + hamiltonian(p, x, u, 1.0, psi2, 0.75);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  // lambda g + <psi, f> with f = (x2, u - x1), g = x2 + b u
  CHECK(hamiltonian(p, x, u, 0.0, psi1, 1.0) == doctest::Approx((-1.2 + 0.2) + (-1.2) + 2.0 * (0.4 - 0.3)));
}

TEST_CASE("control grids contain every vertex and respect open lower bounds") {
  const ControlSet box = ControlSet::box(v2(-1.0, 0.0), v2(1.0, 2.0));
  const auto grid = box.sample_grid(5);
  CHECK(grid.size() == 25);
  int vertices = 0;
  for (const Vec& u : grid) {
    CHECK(box.contains(u));
    if ((std::abs(u[0]) == 1.0) && (u[1] == 0.0 || u[1] == 2.0)) ++vertices;
  }
  CHECK(vertices == 4);

  const ControlSet open = ControlSet::box(v1(0.0), v1(1.0), {true});
  const auto g = open.sample_grid(3);
  CHECK(g.front()[0] == doctest::Approx(1e-9));
  CHECK(g.back()[0] == 1.0);

  const ControlSet fin = ControlSet::finite({v1(0.0), v1(2.0)});
  CHECK(fin.sample_grid(33).size() == 2);
  CHECK(fin.contains(v1(2.0)));
  CHECK_FALSE(fin.contains(v1(1.0)));
}

TEST_CASE("open boxes report containment and boundary distance") {
  const Box b = Box::make(v2(0.0, -std::numeric_limits<double>::infinity()),
                          v2(std::numeric_limits<double>::infinity(), 3.0));
  CHECK(b.contains(v2(1.0, 0.0)));
  CHECK_FALSE(b.contains(v2(0.0, 0.0)));
  CHECK_FALSE(b.contains(v2(1.0, 3.0)));
  CHECK(b.distance_to_boundary(v2(0.5, 0.0)) == doctest::Approx(0.5));
  const auto [comp, upper] = b.nearest_face(v2(5.0, 2.5));
  CHECK(comp == 1);
  CHECK(upper);
  CHECK(Box::unbounded(2).distance_to_boundary(v2(0.0, 0.0)) == std::numeric_limits<double>::infinity());
  CHECK(b.stacked(Box::unbounded(1)).dim() == 3);
}

TEST_CASE("multiplier pairs must be nonnegative and nontrivial") {
  CHECK_NOTHROW((MultiplierPair{0.0, v1(1.0)}.validate()));
  CHECK_NOTHROW((MultiplierPair{1.0, v1(0.0)}.validate()));
  CHECK_THROWS_AS((MultiplierPair{0.0, v1(0.0)}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MultiplierPair{-1.0, v1(1.0)}.validate()), std::invalid_argument);
}
