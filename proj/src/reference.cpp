#include "horizon/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace horizon {

void RamseyParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ramsey: alpha must lie in (0,1)");
  if (!(delta > 0.0)) throw std::invalid_argument("ramsey: delta must be positive");
  if (!(theta > 0.0)) throw std::invalid_argument("ramsey: theta must be positive");
  if (theta == 1.0) throw std::invalid_argument("ramsey: theta = 1 is not supported");
  if (!(k0 > 0.0)) throw std::invalid_argument("ramsey: k0 must be positive");
}

RamseyParams RamseyParams::from(const ParamMap& params) {
  RamseyParams p;
  auto get = [&](const char* key, double& out) {
    if (auto it = params.find(key); it != params.end()) out = it->second;
  };
  get("alpha", p.alpha);
  get("delta", p.delta);
  get("theta", p.theta);
  get("k0", p.k0);
  p.validate();
  return p;
}

ParamMap RamseyParams::to_params() const { return {{"alpha", alpha}, {"delta", delta}, {"theta", theta}, {"k0", k0}}; }

RamseySteadyStates ramsey_steady_state(const RamseyParams& p) {
  p.validate();
  const double k_star = std::pow(p.delta / p.alpha, 1.0 / (p.alpha - 1.0));
  const double c_star = (1.0 - p.alpha) * std::pow(p.delta / p.alpha, p.alpha / (p.alpha - 1.0));
  const double k_zero = std::pow(p.delta, 1.0 / (p.alpha - 1.0));
  return {{k_star, c_star, SteadyKind::interior_saddle}, {k_zero, 0.0, SteadyKind::zero_consumption}};
}

namespace {

Eigen::Vector2d raw_field(const RamseyParams& p, double k, double c) {
  return {std::pow(k, p.alpha) - p.delta * k - c, c * (p.alpha * std::pow(k, p.alpha - 1.0) - p.delta) / p.theta};
}

Box positive_quadrant() {
  Vec lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity();
  return Box::make(lo, hi);
}

Field ramsey_ode(const RamseyParams& p) {
  return [p](double, const Vec& y) { return Vec(raw_field(p, y[0], y[1])); };
}

}  // namespace

Eigen::Vector2d ramsey_field(const RamseyParams& p, double k, double c) {
  if (!(k > 0.0) || !(c > 0.0)) throw std::domain_error("ramsey_field: k and c must be positive");
  return raw_field(p, k, c);
}

double ramsey_stable_slope(const RamseyParams& p) {
  const SteadyState s = ramsey_steady_state(p).interior;
  const double beta = s.c_star * p.alpha * (p.alpha - 1.0) * std::pow(s.k_star, p.alpha - 2.0) / p.theta;
  return std::sqrt(-beta);
}

std::string to_string(RamseyClass c) {
  switch (c) {
    case RamseyClass::saddle: return "saddle";
    case RamseyClass::hits_zero_capital: return "hits_zero_capital";
    case RamseyClass::to_zero_consumption: return "to_zero_consumption";
    case RamseyClass::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

RamseyPath ramsey_classify_path(const RamseyParams& p, double k0, double c0, const RamseySettings& settings,
                                bool use_ball) {
  p.validate();
  if (!(k0 > 0.0) || !(c0 > 0.0)) throw std::invalid_argument("ramsey_classify: k0 and c0 must be positive");
  const SteadyState ss = ramsey_steady_state(p).interior;
  const Box domain = positive_quadrant();
  const Field field = ramsey_ode(p);

  RamseyPath out;
  std::vector<Trajectory> pieces;
  Vec y(2);
  y << k0, c0;
  double t = 0.0;
  while (out.cls == RamseyClass::inconclusive && t < settings.T_max) {
    const double t_next = std::min(settings.T_max, t + settings.chunk);
    Trajectory piece = integrate(field, t, y, t_next, settings.integrator, domain);
    for (std::size_t i = 0; i < piece.times().size(); ++i) {
      const Vec& s = piece.states()[i];
      if (use_ball && std::hypot(s[0] - ss.k_star, s[1] - ss.c_star) < settings.ball_radius) {
        out.cls = RamseyClass::saddle;
      } else if (s[0] > ss.k_star && s[1] < ss.c_star) {
        out.cls = RamseyClass::to_zero_consumption;
      }
      if (out.cls != RamseyClass::inconclusive) {
        out.decided_at = piece.times()[i];
        break;
      }
    }
    if (out.cls == RamseyClass::inconclusive && piece.exit_event()) {
      out.cls = piece.exit_event()->component == 0 ? RamseyClass::hits_zero_capital
                                                   : RamseyClass::to_zero_consumption;
      out.decided_at = piece.exit_event()->time;
    }
    t = piece.t_end();
    y = piece.states().back();
    const bool stop = piece.exit_event().has_value();
    pieces.push_back(std::move(piece));
    if (stop) break;
  }
  out.path = Trajectory::concatenate(std::move(pieces));
  return out;
}

RamseyClass ramsey_classify(const RamseyParams& p, double k0, double c0, const RamseySettings& settings) {
  return ramsey_classify_path(p, k0, c0, settings, true).cls;
}

Trajectory ramsey_euler_path(const RamseyParams& p, double k0, double c0, double T_max,
                             const IntegratorSettings& settings) {
  p.validate();
  if (!(k0 > 0.0) || !(c0 > 0.0)) throw std::invalid_argument("ramsey_euler_path: k0 and c0 must be positive");
  Vec y(2);
  y << k0, c0;
  return integrate(ramsey_ode(p), 0.0, y, T_max, settings, positive_quadrant());
}

ControlSignal ramsey_path_control(const Trajectory& path) {
  return ControlSignal::closed_form([path](double t) {
    Vec u(1);
    u << path.evaluate(std::clamp(t, path.t_begin(), path.t_end()))[1];
    return u;
  });
}

namespace {

// Path restricted to [t_begin, t_cut].
Trajectory truncate(const Trajectory& tr, double t_cut) {
  std::vector<double> ts;
  std::vector<Vec> xs, ds;
  for (std::size_t i = 0; i < tr.times().size() && tr.times()[i] < t_cut; ++i) {
    ts.push_back(tr.times()[i]);
    xs.push_back(tr.states()[i]);
    ds.push_back(tr.derivatives()[i]);
  }
  ts.push_back(t_cut);
  xs.push_back(tr.evaluate(t_cut));
  ds.push_back(tr.evaluate_derivative(t_cut));
  return Trajectory(std::move(ts), std::move(xs), std::move(ds));
}

}  // namespace

ShootResult ramsey_shoot(const RamseyParams& p, const RamseySettings& settings) {
  p.validate();
  const SteadyState ss = ramsey_steady_state(p).interior;
  auto fate = [&](double c0) { return ramsey_classify_path(p, p.k0, c0, settings, false).cls; };

  double hi = 2.0 * std::pow(p.k0, p.alpha) + ss.c_star;
  int tries = 0;
  while (fate(hi) != RamseyClass::hits_zero_capital) {
    if (++tries > 60) throw std::runtime_error("ramsey_shoot: no upper bracket");
    hi *= 2.0;
  }
  double lo = 1e-6 * ss.c_star;
  tries = 0;
  while (fate(lo) != RamseyClass::to_zero_consumption) {
    if (++tries > 20) throw std::runtime_error("ramsey_shoot: no lower bracket");
    lo *= 0.5;
  }

  ShootResult out;
  out.bracket_history.emplace_back(lo, hi);
  double c0 = 0.5 * (lo + hi);
  while (hi - lo > settings.c0_tol && out.iterations < settings.max_iterations) {
    c0 = 0.5 * (lo + hi);
    ++out.iterations;
    const RamseyClass cls = fate(c0);
    if (cls == RamseyClass::inconclusive) break;
    (cls == RamseyClass::hits_zero_capital ? hi : lo) = c0;
    out.bracket_history.emplace_back(lo, hi);
    c0 = 0.5 * (lo + hi);
  }
  out.c0 = c0;

  const RamseyPath shot = ramsey_classify_path(p, p.k0, c0, settings, true);
  if (shot.cls != RamseyClass::saddle) {
    throw std::runtime_error("ramsey_shoot: bisection stagnated, shot path ends as " + to_string(shot.cls));
  }
  auto dist = [&](double t) {
    const Vec s = shot.path.evaluate(t);
    return std::hypot(s[0] - ss.k_star, s[1] - ss.c_star) - settings.ball_radius;
  };
  double t_in = shot.decided_at;
  double t_out = shot.path.t_begin();
  for (double t : shot.path.times()) {
    if (t < t_in) t_out = t;
  }
  if (dist(t_out) > 0.0) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (t_in + t_out);
      (dist(mid) > 0.0 ? t_out : t_in) = mid;
    }
  } else {
    t_in = t_out;
  }
  out.ball_entry_time = t_in;

  const Trajectory head = truncate(shot.path, t_in);
  if (t_in < settings.T_max) {
    const double s = ramsey_stable_slope(p);
    // the offset from the stable line decays at the stable rate, which equals s here
    const Field along = [p, s, ss](double, const Vec& y) {
      const double kdot = std::pow(y[0], p.alpha) - p.delta * y[0] - y[1];
      const double offset = y[1] - ss.c_star - s * (y[0] - ss.k_star);
      Vec d(2);
      d << kdot, s * kdot - s * offset;
      return d;
    };
    Trajectory tail = integrate(along, t_in, head.states().back(), settings.T_max, settings.integrator);
    out.trajectory = Trajectory::concatenate({head, tail});
  } else {
    out.trajectory = head;
  }
  out.control = ramsey_path_control(out.trajectory);
  return out;
}

OscillatorReference::OscillatorReference(double b) : b_(b) {
  if (!(b > 0.0)) throw std::invalid_argument("oscillator: b must be positive");
}

Mat OscillatorReference::K(double t, double tau) const {
  const double c = std::cos(t - tau);
  const double s = std::sin(t - tau);
  Mat k(2, 2);
  k << c, s, -s, c;
  return k;
}

Vec OscillatorReference::x_hat(double t) const {
  Vec x(2);
  x << 1.0 - std::cos(t), std::sin(t);
  return x;
}

Vec OscillatorReference::psi(double r, double phi, double t) const {
  if (std::abs(r) > b_ + 1e-12) throw std::invalid_argument("oscillator: |r| must not exceed b");
  Vec p(2);
  p << -r * std::cos(t + phi) - 1.0, r * std::sin(t + phi);
  return p;
}

Vec OscillatorReference::jx(double tau, double T) const {
  Vec j(2);
  j << std::cos(T - tau) - 1.0, std::sin(T - tau);
  return j;
}

double OscillatorReference::delta_h(double u, double tau, double T) const {
  return (u - 1.0) * (std::sin(T - tau) + b_);
}

double OscillatorReference::hamiltonian_along(double r, double phi) const { return r * std::sin(phi) + b_; }

Vec OscillatorReference::transported(double r, double phi, double t) const {
  Vec v(2);
  v << -r * std::cos(phi) - std::cos(t), r * std::sin(phi) - std::sin(t);
  return v;
}

double OscillatorReference::delayed_start_gap(double s, double T) const {
  if (T <= s) return std::cos(T) - 1.0 - b_ * T;
  return std::cos(T) - std::cos(T - s) - b_ * s;
}

IntegratorReference::IntegratorReference(double rho_, double a0_, double lambda_)
    : rho(rho_), a0(a0_), lambda(lambda_) {
  if (!(rho >= 0.0)) throw std::invalid_argument("integrator: rho must be nonnegative");
  if (!(lambda >= 0.0)) throw std::invalid_argument("integrator: lambda must be nonnegative");
  if (lambda == 0.0 && a0 == 0.0) throw std::invalid_argument("integrator: (lambda, a0) must not vanish");
}

double IntegratorReference::psi(double t) const {
  if (rho == 0.0) return a0 - lambda * t;
  return a0 + lambda * std::exp(-rho * t) / rho;
}

std::optional<double> IntegratorReference::psi_hat(double t) const {
  if (psi_hat_diverges()) return std::nullopt;
  if (lambda == 0.0) return 0.0;
  return lambda * std::exp(-rho * t) / rho;
}

bool IntegratorReference::max_principle_holds() const {
  if (rho == 0.0) return lambda == 0.0 && a0 >= 0.0;
  return a0 >= 0.0;
}

}  // namespace horizon
