#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "horizon/control_signal.hpp"
#include "horizon/ode.hpp"
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

double rk4_error(double h) {
  IntegratorSettings s;
  s.method = Method::rk4_fixed;
  s.max_step = h;
  const Field f = [](double t, const Vec& y) { return Vec(y * std::cos(t)); };
  const Trajectory tr = integrate(f, 0.0, v1(1.0), 2.0, s);
  return std::abs(tr.evaluate(2.0)[0] - std::exp(std::sin(2.0)));
}

}  // namespace

TEST_CASE("adaptive integration reproduces exponential decay") {
  const Field f = [](double, const Vec& y) { return Vec(-y); };
  const Trajectory tr = integrate(f, 0.0, v1(1.0), 10.0, precise_settings());
  CHECK(tr.t_end() == 10.0);
  for (double t : {0.5, 1.0, 3.7, 10.0}) CHECK(tr.evaluate(t)[0] == doctest::Approx(std::exp(-t)).epsilon(1e-8));
}

TEST_CASE("fixed-step RK4 converges with order close to four") {
  const double e1 = rk4_error(0.1);
  const double e2 = rk4_error(0.05);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.7);
  CHECK(order <= 4.3);
}

TEST_CASE("forward then backward integration returns to the start") {
  const Field f = [](double t, const Vec& y) { return v2(y[1], -y[0] + 0.3 * std::sin(t)); };
  const Trajectory fwd = integrate(f, 0.0, v2(1.0, 0.0), 7.0, precise_settings());
  const Trajectory back = integrate(f, 7.0, fwd.evaluate(7.0), 0.0, precise_settings());
  CHECK(back.t_begin() == 0.0);
  CHECK(back.t_end() == 7.0);
  CHECK((back.evaluate(0.0) - v2(1.0, 0.0)).norm() < 1e-8);
}

TEST_CASE("dense output matches the exact solution between nodes") {
  const Field f = [](double, const Vec& y) { return v2(y[1], -y[0]); };
  const Trajectory tr = integrate(f, 0.0, v2(0.0, 1.0), 20.0, precise_settings());
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.02 * i + 0.0071;
    if (t > 20.0) break;
    worst = std::max(worst, std::abs(tr.evaluate(t)[0] - std::sin(t)));
    worst = std::max(worst, std::abs(tr.evaluate_derivative(t)[0] - std::cos(t)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("stops become exact nodes") {
  const Field f = [](double, const Vec& y) { return Vec(-y); };
  const std::vector<double> stops{0.123, 4.5};
  const Trajectory tr = integrate(f, 0.0, v1(1.0), 5.0, {}, std::nullopt, stops);
  for (double s : stops) {
    CHECK(std::find(tr.times().begin(), tr.times().end(), s) != tr.times().end());
  }
}

TEST_CASE("leaving the domain produces a localized exit event") {
  const Field f = [](double, const Vec&) { return v1(-1.0); };
  const Box domain = Box::make(v1(0.0), v1(std::numeric_limits<double>::infinity()));
  const Trajectory tr = integrate(f, 0.0, v1(1.0), 5.0, precise_settings(), domain);
  REQUIRE(tr.exit_event().has_value());
  CHECK(tr.exit_event()->time == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(tr.exit_event()->component == 0);
  CHECK_FALSE(tr.exit_event()->upper);
  CHECK(tr.t_end() <= 1.0);
  CHECK_THROWS_AS(integrate(f, 0.0, v1(-1.0), 5.0, precise_settings(), domain), std::invalid_argument);
}

TEST_CASE("non-finite field values raise an integration error") {
  const Field f = [](double t, const Vec& y) { return t > 1.0 ? v1(std::nan("")) : Vec(y); };
  CHECK_THROWS_AS(integrate(f, 0.0, v1(1.0), 3.0, {}), IntegrationError);
}

TEST_CASE("evaluation outside the trajectory span throws") {
  const Field f = [](double, const Vec& y) { return Vec(y); };
  const Trajectory tr = integrate(f, 0.0, v1(1.0), 1.0, {});
  CHECK(tr.covers(0.5));
  CHECK_FALSE(tr.covers(1.5));
  CHECK_THROWS_AS(static_cast<void>(tr.evaluate(1.5)), std::out_of_range);
}

TEST_CASE("integrator settings are validated") {
  IntegratorSettings s;
  s.rel_tol = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.max_step = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("piecewise controls follow the left-closed convention and integrate across jumps") {
  const ControlSignal u = ControlSignal::piecewise_constant({1.0}, {v1(0.0), v1(1.0)});
  CHECK(u.evaluate(1.0)[0] == 0.0);
  CHECK(u.evaluate(1.0, ControlSignal::Side::right_limit)[0] == 1.0);
  CHECK(u.evaluate(1.0 + 1e-12)[0] == 1.0);
  CHECK(u.evaluate_within(1.0, 1.0, 2.0)[0] == 1.0);

  const ControlProblem p = make_builtin_problem("integrator", {{"rho", 0.0}});
  const Trajectory tr = solve_state(p, u, 0.0, v1(0.0), 3.0);
  CHECK(tr.evaluate(1.0)[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tr.evaluate(3.0)[0] == doctest::Approx(2.0).epsilon(1e-10));
  // running payoff integral of x = max(t - 1, 0)
  const Trajectory pay = solve_with_payoff(p, u, 0.0, v1(0.0), 3.0);
  CHECK(pay.evaluate(3.0)[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("needles replace the control on a left-open interval") {
  const ControlSignal base = ControlSignal::constant(v1(1.0));
  const ControlSignal n = base.with_needle(2.0, 0.5, v1(0.0));
  CHECK(n.evaluate(1.5)[0] == 1.0);
  CHECK(n.evaluate(1.6)[0] == 0.0);
  CHECK(n.evaluate(2.0)[0] == 0.0);
  CHECK(n.evaluate(2.0, ControlSignal::Side::right_limit)[0] == 1.0);
  CHECK_THROWS_AS(static_cast<void>(base.with_needle(2.0, 0.0, v1(0.0))), std::invalid_argument);
}

TEST_CASE("paired payoff integration resolves small differences") {
  const ControlProblem p = make_builtin_problem("integrator", {{"rho", 0.0}});
  const ControlSignal a = ControlSignal::constant(v1(1.0));
  const ControlSignal b = a.with_needle(1.0, 1e-4, v1(0.0));
  const Trajectory tr = solve_paired_payoff(p, b, v1(0.0), a, v1(0.0), 0.0, 5.0);
  // the needle costs alpha (T - tau) + alpha^2 / 2
  CHECK(paired_gap(tr, 1, 5.0) == doctest::Approx(-(1e-4 * 4.0 + 0.5e-8)).epsilon(1e-7));
}

TEST_CASE("concatenation joins pieces that share an endpoint") {
  const Field f = [](double, const Vec& y) { return Vec(-y); };
  const Trajectory a = integrate(f, 0.0, v1(1.0), 1.0, precise_settings());
  const Trajectory b = integrate(f, 1.0, a.evaluate(1.0), 2.0, precise_settings());
  const Trajectory c = Trajectory::concatenate({a, b});
  CHECK(c.t_begin() == 0.0);
  CHECK(c.t_end() == 2.0);
  CHECK(c.evaluate(1.5)[0] == doctest::Approx(std::exp(-1.5)).epsilon(1e-8));
}
