#include <doctest.h>

#include <cmath>
#include <numbers>

#include "horizon/conditions.hpp"
#include "horizon/control_signal.hpp"
#include "horizon/problem.hpp"
#include "horizon/reference.hpp"
#include "horizon/variational.hpp"
#include "horizon/verdict.hpp"

using namespace horizon;

namespace {

constexpr double kPi = std::numbers::pi;

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

struct Setup {
  ControlProblem problem;
  ControlSignal control = ControlSignal::constant(v1(1.0));
  Trajectory traj;
  Setup(const std::string& name, const ParamMap& params, double T)
      : problem(make_builtin_problem(name, params)) {
    traj = solve_state(problem, control, 0.0, problem.initial_state, T, precise_settings());
  }

  [[nodiscard]] std::vector<JxRecord> records(std::span<const double> taus, double T) const {
    std::vector<JxRecord> out;
    for (double tau : taus) out.push_back(accumulate_jx(problem, traj, control, tau, default_horizon_grid(tau, T)));
    return out;
  }
};

// psi = (-r cos(t + phi) - 1, r sin(t + phi)) for the oscillator with lambda = 1.
Vec oscillator_psi(double r, double phi, double t) { return v2(-r * std::cos(t + phi) - 1.0, r * std::sin(t + phi)); }

}  // namespace

TEST_CASE("hamiltonian increment matches the worked values") {
  SUBCASE("oscillator") {
    Setup s("oscillator", {{"b", 0.5}}, 10.0);
    const std::vector<double> grid{0.0, kPi / 2};
    const JxRecord jx = accumulate_jx(s.problem, s.traj, s.control, 0.0, grid);
    CHECK(delta_hamiltonian(s.problem, s.traj, s.control, jx, v1(-1.0), 0.0, kPi / 2) ==
          doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(delta_hamiltonian(s.problem, s.traj, s.control, jx, v1(1.0), 0.0, kPi / 2) == 0.0);
  }
  SUBCASE("undiscounted integrator") {
    Setup s("integrator", {{"rho", 0.0}}, 10.0);
    const std::vector<double> grid{1.0, 5.0};
    const JxRecord jx = accumulate_jx(s.problem, s.traj, s.control, 1.0, grid);
    CHECK(delta_hamiltonian(s.problem, s.traj, s.control, jx, v1(0.0), 1.0, 5.0) ==
          doctest::Approx(-4.0).epsilon(1e-9));
  }
}

TEST_CASE("oscillator meets the weak limit condition but not the strong one") {
  const double T = 100.0 * kPi;
  Setup s("oscillator", {{"b", 0.5}}, T);
  const std::vector<double> taus{0.0, 1.0, 2.0};
  const auto T_grid = uniform_grid_spacing(0.0, T, 0.05);
  const auto woo = check_general(s.problem, s.traj, s.control, taus, 5, T_grid, GeneralMode::woo);
  const auto oo = check_general(s.problem, s.traj, s.control, taus, 5, T_grid, GeneralMode::oo);
  CHECK(woo.verdict.holds());
  CHECK(oo.verdict.fails());
  // liminf (u - 1)(sin + b) = (u - 1)(1 + b), limsup = (u - 1)(b - 1)
  for (std::size_t i = 0; i < taus.size(); ++i) {
    for (std::size_t j = 0; j < woo.control_grid.size(); ++j) {
      const double u = woo.control_grid[j][0];
      CHECK(woo.cell(i, j).estimate == doctest::Approx((u - 1.0) * 1.5).epsilon(1e-5));
      CHECK(oo.cell(i, j).estimate == doctest::Approx((u - 1.0) * -0.5).epsilon(1e-5));
    }
  }
}

TEST_CASE("discounted integrator meets both limit conditions") {
  const double T = 400.0;
  Setup s("integrator", {{"rho", 0.1}}, T);
  const std::vector<double> taus{0.0, 1.0, 2.0};
  const auto T_grid = uniform_grid_spacing(0.0, T, 0.1);
  CHECK(check_general(s.problem, s.traj, s.control, taus, 5, T_grid, GeneralMode::woo).verdict.holds());
  CHECK(check_general(s.problem, s.traj, s.control, taus, 5, T_grid, GeneralMode::oo).verdict.holds());
}

TEST_CASE("limit condition verdicts are stable under grid refinement") {
  const double T = 100.0 * kPi;
  Setup s("oscillator", {{"b", 0.5}}, T);
  const std::vector<double> taus{0.0, 1.5};
  for (GeneralMode mode : {GeneralMode::woo, GeneralMode::oo}) {
    const auto coarse =
        check_general(s.problem, s.traj, s.control, taus, 3, uniform_grid_spacing(0.0, T, 0.05), mode);
    const auto fine =
        check_general(s.problem, s.traj, s.control, taus, 3, uniform_grid_spacing(0.0, T, 0.025), mode);
    CHECK(coarse.verdict.status == fine.verdict.status);
    for (std::size_t k = 0; k < coarse.cells.size(); ++k) {
      CHECK(coarse.cells[k].status == fine.cells[k].status);
      CHECK(coarse.cells[k].estimate == doctest::Approx(fine.cells[k].estimate).epsilon(1e-3));
    }
  }
}

TEST_CASE("limit condition rejects horizon grids beyond the trajectory") {
  Setup s("oscillator", {{"b", 0.5}}, 20.0);
  const std::vector<double> taus{0.0};
  CHECK_THROWS(check_general(s.problem, s.traj, s.control, taus, 3, uniform_grid(0.0, 40.0, 81), GeneralMode::woo));
}

TEST_CASE("oscillator multipliers violate every classical condition") {
  const double T = 400.0;
  Setup s("oscillator", {{"b", 0.5}}, T);
  const double r = 0.5;
  const double phi = 0.0;
  const CostatePath c = integrate_adjoint(s.problem, s.traj, s.control, T, oscillator_psi(r, phi, T), 1.0);
  double worst = 0.0;
  for (double t : uniform_grid(0.0, T, 101)) worst = std::max(worst, (c.psi(t) - oscillator_psi(r, phi, t)).norm());
  CHECK(worst < 1e-8);
  const TransitionOperator K = transition_matrix(s.problem, s.traj, s.control, 0.0);
  const ClassicalReport rep = check_classical(s.problem, s.traj, s.control, c, 1.0, K);
  CHECK(rep.psi_to_zero.fails());
  CHECK(rep.state_costate.fails());
  CHECK(rep.hamiltonian.fails());
  CHECK(rep.transported.fails());
  CHECK(check_max_principle(s.problem, s.traj, s.control, c, 1.0, 33, uniform_grid(0.0, T, 401)).holds());
}

TEST_CASE("oscillator hamiltonian vanishes when r sin phi = -b") {
  const double T = 400.0;
  Setup s("oscillator", {{"b", 0.5}}, T);
  const CostatePath c = integrate_adjoint(s.problem, s.traj, s.control, T, oscillator_psi(0.5, -kPi / 2, T), 1.0);
  const TransitionOperator K = transition_matrix(s.problem, s.traj, s.control, 0.0);
  const ClassicalReport rep = check_classical(s.problem, s.traj, s.control, c, 1.0, K);
  CHECK(rep.hamiltonian.holds());
  CHECK(rep.psi_to_zero.fails());
}

TEST_CASE("classical conditions on the integrator") {
  const double T = 400.0;
  SUBCASE("discounted, no constant part") {
    Setup s("integrator", {{"rho", 0.1}}, T);
    const CostatePath c = integrate_adjoint(s.problem, s.traj, s.control, T, v1(std::exp(-0.1 * T) / 0.1), 1.0);
    const TransitionOperator K = transition_matrix(s.problem, s.traj, s.control, 0.0);
    const ClassicalReport rep = check_classical(s.problem, s.traj, s.control, c, 1.0, K);
    CHECK(rep.psi_to_zero.holds());
    CHECK(rep.transported.holds());
    CHECK(rep.hamiltonian.holds());
    CHECK(check_max_principle(s.problem, s.traj, s.control, c, 1.0, 33, uniform_grid(0.0, T, 401)).holds());
  }
  SUBCASE("undiscounted abnormal") {
    Setup s("integrator", {{"rho", 0.0}}, T);
    const CostatePath c = integrate_adjoint(s.problem, s.traj, s.control, T, v1(1.0), 0.0);
    const TransitionOperator K = transition_matrix(s.problem, s.traj, s.control, 0.0);
    const ClassicalReport rep = check_classical(s.problem, s.traj, s.control, c, 0.0, K);
    CHECK(rep.psi_to_zero.fails());
    CHECK(rep.state_costate.fails());
    CHECK(rep.hamiltonian.fails());
    CHECK(rep.transported.fails());
    CHECK(check_max_principle(s.problem, s.traj, s.control, c, 0.0, 33, uniform_grid(0.0, T, 401)).holds());
  }
  SUBCASE("undiscounted normal violates the maximum condition") {
    Setup s("integrator", {{"rho", 0.0}}, T);
    const CostatePath c = integrate_adjoint(s.problem, s.traj, s.control, T, v1(-T), 1.0);
    CHECK(c.psi(10.0)[0] == doctest::Approx(-10.0).epsilon(1e-9));
    CHECK(check_max_principle(s.problem, s.traj, s.control, c, 1.0, 33, uniform_grid(0.0, T, 401)).fails());
  }
}

TEST_CASE("costate decomposition recovers the constant part") {
  const double T = 400.0;
  const std::vector<double> taus{0.0, 1.0, 2.0};
  SUBCASE("discounted integrator") {
    Setup s("integrator", {{"rho", 0.1}}, T);
    const auto jx = s.records(taus, T);
    const TransitionOperator K = transition_matrix(s.problem, s.traj, s.control, 0.0);
    for (double a0 : {0.0, 0.7}) {
      const CostatePath c =
          integrate_adjoint(s.problem, s.traj, s.control, T, v1(a0 + std::exp(-0.1 * T) / 0.1), 1.0);
      const CostateDecomposition d = decompose_costate(c, K, jx, 1.0);
      CHECK(d.verdict.holds());
      REQUIRE(d.a0.has_value());
      CHECK((*d.a0)[0] == doctest::Approx(a0).epsilon(1e-6));
      CHECK(d.residual < 1e-4);
      // a0 = 0 exactly when the transported costate vanishes
      const ClassicalReport rep = check_classical(s.problem, s.traj, s.control, c, 1.0, K);
      CHECK(rep.transported.holds() == (a0 == 0.0));
    }
  }
  SUBCASE("homogeneous oscillator costate") {
    Setup s("oscillator", {{"b", 0.5}}, T);
    const auto jx = s.records(taus, T);
    const TransitionOperator K = transition_matrix(s.problem, s.traj, s.control, 0.0);
    const Vec v = v2(0.4, -0.2);
    const CostatePath c = integrate_adjoint(s.problem, s.traj, s.control, T, K.evaluate(0.0, T).transpose() * v, 0.0);
    const CostateDecomposition d = decompose_costate(c, K, jx, 0.0);
    CHECK(d.verdict.holds());
    REQUIRE(d.a0.has_value());
    CHECK((*d.a0 - v).norm() < 1e-6);
    CHECK(d.residual < 1e-6);
  }
  SUBCASE("normal oscillator costate has no constant part") {
    Setup s("oscillator", {{"b", 0.5}}, T);
    const auto jx = s.records(taus, T);
    const TransitionOperator K = transition_matrix(s.problem, s.traj, s.control, 0.0);
    const CostatePath c = integrate_adjoint(s.problem, s.traj, s.control, T, oscillator_psi(0.25, 0.7, T), 1.0);
    const CostateDecomposition d = decompose_costate(c, K, jx, 1.0);
    CHECK(d.verdict.fails());
    CHECK_FALSE(d.a0.has_value());
    CHECK(std::isnan(d.residual));
  }
}

TEST_CASE("pointwise payoff maximization singles out the saddle path") {
  const RamseyParams rp;
  const ControlProblem p = make_builtin_problem("ramsey", rp.to_params());
  const double T = 200.0;
  const ShootResult shot = ramsey_shoot(rp);
  std::vector<GmaxCandidate> family;
  family.push_back({solve_state(p, shot.control, 0.0, p.initial_state, T, precise_settings()), shot.control});
  for (double c0 : {0.5 * shot.c0, shot.c0 + 0.5}) {
    const Trajectory path = ramsey_euler_path(rp, rp.k0, c0, T);
    const ControlSignal u = ramsey_path_control(path);
    family.push_back({solve_state(p, u, 0.0, p.initial_state, T, precise_settings()), u});
  }
  const auto verdicts = check_gmax(p, family, uniform_grid(0.0, T, 201));
  REQUIRE(verdicts.size() == 3);
  CHECK(verdicts[0].holds());
  CHECK(verdicts[1].fails());
  CHECK(verdicts[2].fails());

  const std::vector<GmaxCandidate> alone{family[0]};
  CHECK(check_gmax(p, alone, uniform_grid(0.0, T, 21))[0].holds());

  Setup integ("integrator", {{"rho", 0.1}}, 10.0);
  const std::vector<GmaxCandidate> bad{{integ.traj, integ.control}};
  CHECK_THROWS_AS(check_gmax(integ.problem, bad, uniform_grid(0.0, 10.0, 11)), std::invalid_argument);
}
