#include "horizon/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace horizon {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr std::size_t kMaxSteps = 50'000'000;

enum class StepKind { ok, stage_outside, end_outside };

struct StepResult {
  StepKind kind = StepKind::ok;
  Vec y_new;
  Vec f_new;
  double err = 0.0;
};

class Stepper {
 public:
  Stepper(const Field& g, const IntegratorSettings& settings, const std::optional<Box>& domain, double t0,
          int dir)
      : g_(g), settings_(settings), domain_(domain), t0_(t0), dir_(dir) {}

  Vec eval(double s, const Vec& y) const {
    Vec v = static_cast<double>(dir_) * g_(t0_ + dir_ * s, y);
    if (!v.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite field value at t=" << (t0_ + dir_ * s);
      throw IntegrationError(msg.str());
    }
    return v;
  }

  bool inside(const Vec& y) const { return !domain_ || domain_->contains(y); }

  StepResult attempt(double s, const Vec& y, const Vec& k1, double h) const {
    StepResult r;
    if (settings_.method == Method::rk4_fixed) {
      Vec y2 = y + 0.5 * h * k1;
      if (!inside(y2)) return stage_outside();
      Vec k2 = eval(s + 0.5 * h, y2);
      Vec y3 = y + 0.5 * h * k2;
      if (!inside(y3)) return stage_outside();
      Vec k3 = eval(s + 0.5 * h, y3);
      Vec y4 = y + h * k3;
      if (!inside(y4)) return stage_outside();
      Vec k4 = eval(s + h, y4);
      r.y_new = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!inside(r.y_new)) return end_outside();
      r.f_new = eval(s + h, r.y_new);
      r.err = 0.0;
      return r;
    }
    Vec ys = y + h * a21 * k1;
    if (!inside(ys)) return stage_outside();
    Vec k2 = eval(s + c2 * h, ys);
    ys = y + h * (a31 * k1 + a32 * k2);
    if (!inside(ys)) return stage_outside();
    Vec k3 = eval(s + c3 * h, ys);
    ys = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    if (!inside(ys)) return stage_outside();
    Vec k4 = eval(s + c4 * h, ys);
    ys = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    if (!inside(ys)) return stage_outside();
    Vec k5 = eval(s + c5 * h, ys);
    ys = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    if (!inside(ys)) return stage_outside();
    Vec k6 = eval(s + h, ys);
    r.y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    if (!inside(r.y_new)) return end_outside();
    r.f_new = eval(s + h, r.y_new);
    Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * r.f_new);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = settings_.abs_tol + settings_.rel_tol * std::max(std::abs(y[i]), std::abs(r.y_new[i]));
      acc += (err[i] / sc) * (err[i] / sc);
    }
    r.err = y.size() > 0 ? std::sqrt(acc / static_cast<double>(y.size())) : 0.0;
    return r;
  }

 private:
  static StepResult stage_outside() { return StepResult{StepKind::stage_outside, {}, {}, 0.0}; }
  static StepResult end_outside() { return StepResult{StepKind::end_outside, {}, {}, 0.0}; }

  const Field& g_;
  const IntegratorSettings& settings_;
  const std::optional<Box>& domain_;
  double t0_;
  int dir_;
};

ExitEvent make_event(double t, const Box& domain, const Vec& y, const std::string& reason) {
  ExitEvent ev;
  ev.time = t;
  const auto [component, upper] = domain.nearest_face(y);
  ev.component = component;
  ev.upper = upper;
  std::ostringstream msg;
  msg << reason << ": component " << component << " reached its " << (upper ? "upper" : "lower") << " bound";
  if (component >= 0) msg << " " << (upper ? domain.upper[component] : domain.lower[component]);
  msg << " at t=" << t;
  ev.description = msg.str();
  return ev;
}

}  // namespace

void IntegratorSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("integrator tolerances must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("integrator max_step must be positive");
}

IntegratorSettings precise_settings() {
  IntegratorSettings s;
  s.rel_tol = 1e-11;
  s.abs_tol = 1e-13;
  s.max_step = 0.25;
  return s;
}

Trajectory::Trajectory(std::vector<double> times, std::vector<Vec> states, std::vector<Vec> derivatives,
                       std::optional<ExitEvent> exit_event)
    : times_(std::move(times)),
      states_(std::move(states)),
      derivatives_(std::move(derivatives)),
      exit_event_(std::move(exit_event)) {
  if (times_.empty() || times_.size() != states_.size() || times_.size() != derivatives_.size()) {
    throw std::invalid_argument("Trajectory: inconsistent node arrays");
  }
  if (!std::is_sorted(times_.begin(), times_.end())) {
    throw std::invalid_argument("Trajectory: node times must be non-decreasing");
  }
}

bool Trajectory::covers(double t) const {
  if (times_.empty()) return false;
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  return t >= times_.front() - slack && t <= times_.back() + slack;
}

std::size_t Trajectory::interval(double t) const {
  if (!covers(t)) {
    std::ostringstream msg;
    msg << "Trajectory: t=" << t << " outside [" << t_begin() << ", " << t_end() << "]";
    throw std::out_of_range(msg.str());
  }
  if (times_.size() == 1) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t j = static_cast<std::size_t>(it - times_.begin());
  if (j == 0) j = 1;
  if (j >= times_.size()) {
    j = times_.size() - 1;
    while (j > 1 && times_[j - 1] == times_[j]) --j;
  }
  return j - 1;
}

Vec Trajectory::evaluate(double t) const {
  const std::size_t i = interval(t);
  if (times_.size() == 1 || t <= times_[i]) return states_[i];
  if (t >= times_[i + 1]) return states_[i + 1];
  const double h = times_[i + 1] - times_[i];
  const double th = (t - times_[i]) / h;
  const double th2 = th * th;
  const double th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * states_[i] + (th3 - 2 * th2 + th) * h * derivatives_[i] +
         (-2 * th3 + 3 * th2) * states_[i + 1] + (th3 - th2) * h * derivatives_[i + 1];
}

Vec Trajectory::evaluate_derivative(double t) const {
  const std::size_t i = interval(t);
  if (times_.size() == 1) return derivatives_[0];
  const double h = times_[i + 1] - times_[i];
  const double th = std::clamp((t - times_[i]) / h, 0.0, 1.0);
  const double th2 = th * th;
  return (6 * th2 - 6 * th) / h * states_[i] + (3 * th2 - 4 * th + 1) * derivatives_[i] +
         (-6 * th2 + 6 * th) / h * states_[i + 1] + (3 * th2 - 2 * th) * derivatives_[i + 1];
}

Trajectory Trajectory::concatenate(std::vector<Trajectory> pieces) {
  std::erase_if(pieces, [](const Trajectory& p) { return p.empty(); });
  if (pieces.empty()) throw std::invalid_argument("Trajectory::concatenate: no pieces");
  std::sort(pieces.begin(), pieces.end(),
            [](const Trajectory& a, const Trajectory& b) { return a.t_begin() < b.t_begin(); });
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> derivs;
  std::optional<ExitEvent> exit;
  for (auto& p : pieces) {
    times.insert(times.end(), p.times_.begin(), p.times_.end());
    states.insert(states.end(), p.states_.begin(), p.states_.end());
    derivs.insert(derivs.end(), p.derivatives_.begin(), p.derivatives_.end());
    if (p.exit_event_) exit = p.exit_event_;
  }
  return Trajectory(std::move(times), std::move(states), std::move(derivs), std::move(exit));
}

Trajectory integrate(const Field& field, double t0, const Vec& y0, double t_end, const IntegratorSettings& settings,
                     const std::optional<Box>& domain, std::span<const double> stops) {
  settings.validate();
  if (!std::isfinite(t0) || !std::isfinite(t_end)) throw std::invalid_argument("integrate: non-finite time span");
  if (domain && !domain->contains(y0)) throw std::invalid_argument("integrate: initial state outside the domain");

  const int dir = t_end >= t0 ? 1 : -1;
  const double span = std::abs(t_end - t0);
  Stepper stepper(field, settings, domain, t0, dir);

  std::vector<double> s_nodes{0.0};
  std::vector<Vec> y_nodes{y0};
  std::vector<Vec> f_nodes{stepper.eval(0.0, y0)};
  std::optional<ExitEvent> exit;

  std::vector<double> s_stops;
  for (double p : stops) {
    const double sp = dir * (p - t0);
    if (sp > 0.0 && sp < span) s_stops.push_back(sp);
  }
  s_stops.push_back(span);
  std::sort(s_stops.begin(), s_stops.end());
  s_stops.erase(std::unique(s_stops.begin(), s_stops.end()), s_stops.end());

  const double event_floor = std::max(1e-9 * span, 1e-300);
  const double underflow = std::max(1e-13 * std::max(1.0, span), 1e-300);
  const bool adaptive = settings.method == Method::rk45_adaptive;

  double s = 0.0;
  Vec y = y0;
  Vec f = f_nodes.front();
  double h = settings.max_step;
  if (adaptive) {
    const double d0 = y.lpNorm<Eigen::Infinity>();
    const double d1 = f.lpNorm<Eigen::Infinity>();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-3 : 0.01 * d0 / d1;
    h = std::clamp(h, 1e-8 * std::max(1.0, span), settings.max_step);
  }
  std::size_t stop_idx = 0;
  std::size_t steps = 0;

  auto record_event = [&](double s_event, const Vec& y_event, const std::string& reason) {
    exit = make_event(t0 + dir * s_event, *domain, y_event, reason);
  };

  while (s < span && !exit) {
    if (++steps > kMaxSteps) throw IntegrationError("integrate: step limit exceeded");
    while (stop_idx < s_stops.size() && s_stops[stop_idx] <= s) ++stop_idx;
    const double target = s_stops[stop_idx];
    double h_try = adaptive ? std::min(h, settings.max_step) : settings.max_step;
    h_try = std::min(h_try, h);
    bool landing = false;
    if (s + h_try >= target - 1e-12 * std::max(1.0, target)) {
      h_try = target - s;
      landing = true;
    }

    StepResult r = stepper.attempt(s, y, f, h_try);

    if (r.kind == StepKind::stage_outside) {
      h = 0.5 * h_try;
      if (h < event_floor) record_event(s, y, "domain exit");
      continue;
    }
    if (r.kind == StepKind::end_outside) {
      double lo = 0.0;
      double hi = h_try;
      Vec y_lo = y;
      Vec f_lo = f;
      for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        StepResult m = stepper.attempt(s, y, f, mid);
        if (m.kind == StepKind::ok) {
          lo = mid;
          y_lo = m.y_new;
          f_lo = m.f_new;
        } else {
          hi = mid;
        }
        const bool time_ok = (hi - lo) <= event_floor;
        const bool state_ok = domain->distance_to_boundary(y_lo) <= settings.abs_tol;
        if (time_ok && state_ok) break;
        if ((hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, s + hi)) break;
      }
      if (lo > 0.0) {
        s += lo;
        y = y_lo;
        f = f_lo;
        s_nodes.push_back(s);
        y_nodes.push_back(y);
        f_nodes.push_back(f);
      }
      record_event(s, y, "domain exit");
      break;
    }
    if (adaptive && r.err > 1.0) {
      h = h_try * std::max(0.2, 0.9 * std::pow(r.err, -0.2));
      if (h < underflow || (domain && h < event_floor)) {
        if (domain && domain->distance_to_boundary(y) < 1e-3 * (1.0 + y.lpNorm<Eigen::Infinity>())) {
          record_event(s, y, "step-size collapse next to the domain boundary");
          break;
        }
        if (h < underflow) {
          std::ostringstream msg;
          msg << "integrate: step-size underflow at t=" << (t0 + dir * s);
          throw IntegrationError(msg.str());
        }
      }
      continue;
    }

    s = landing ? target : s + h_try;
    y = r.y_new;
    f = r.f_new;
    s_nodes.push_back(s);
    y_nodes.push_back(y);
    f_nodes.push_back(f);
    if (adaptive) {
      const double factor = r.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r.err, -0.2), 0.2, 5.0);
      const double h_next = h_try * factor;
      h = landing ? std::max(h_next, std::min(h, settings.max_step)) : h_next;
      h = std::min(h, settings.max_step);
    } else {
      h = settings.max_step;
    }
  }

  std::vector<double> times(s_nodes.size());
  std::vector<Vec> derivs(f_nodes.size());
  for (std::size_t i = 0; i < s_nodes.size(); ++i) {
    times[i] = t0 + dir * s_nodes[i];
    derivs[i] = static_cast<double>(dir) * f_nodes[i];
  }
  if (dir < 0) {
    std::reverse(times.begin(), times.end());
    std::reverse(y_nodes.begin(), y_nodes.end());
    std::reverse(derivs.begin(), derivs.end());
  }
  if (!exit) {
    // Snap the terminal node onto the requested end time.
    (dir > 0 ? times.back() : times.front()) = t_end;
  }
  return Trajectory(std::move(times), std::move(y_nodes), std::move(derivs), std::move(exit));
}

Trajectory integrate_segmented(const SegmentFieldFactory& make_field, double t0, const Vec& y0, double t_end,
                               std::span<const double> breakpoints, const IntegratorSettings& settings,
                               const std::optional<Box>& domain, std::span<const double> stops) {
  const double lo = std::min(t0, t_end);
  const double hi = std::max(t0, t_end);
  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (t_end < t0) std::reverse(cuts.begin(), cuts.end());

  std::vector<double> points{t0};
  points.insert(points.end(), cuts.begin(), cuts.end());
  points.push_back(t_end);

  std::vector<Trajectory> pieces;
  Vec y = y0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    if (a == b && points.size() > 2) continue;
    Field field = make_field(std::min(a, b), std::max(a, b));
    Trajectory piece = integrate(field, a, y, b, settings, domain, stops);
    const bool exited = piece.exit_event().has_value();
    y = b >= a ? piece.states().back() : piece.states().front();
    pieces.push_back(std::move(piece));
    if (exited) break;
  }
  return Trajectory::concatenate(std::move(pieces));
}

}  // namespace horizon
