#include "horizon/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "horizon/conditions.hpp"
#include "horizon/overtaking.hpp"
#include "horizon/reference.hpp"
#include "horizon/variational.hpp"

namespace horizon::cli {

namespace {

constexpr double kPi = std::numbers::pi;

ParamMap example_defaults(BuiltinExample e) {
  switch (e) {
    case BuiltinExample::ramsey: return {{"alpha", 0.4}, {"delta", 0.05}, {"theta", 0.5}, {"k0", 10.0}};
    case BuiltinExample::integrator: return {{"rho", 0.1}, {"a0", 0.0}, {"lambda", 1.0}};
    case BuiltinExample::oscillator: return {{"b", 0.5}};
  }
  return {};
}

Vec vec1(double v) {
  Vec x(1);
  x << v;
  return x;
}

struct Table {
  ReportTable t;
  void add(std::vector<Cell> row) { t.rows.push_back(std::move(row)); }
};

std::string status_of(const ConditionVerdict& v) { return to_string(v.status); }

double last_value(const ConditionVerdict& v) {
  return v.diagnostic_series.empty() ? std::numeric_limits<double>::quiet_NaN() : v.diagnostic_series.back().second;
}

void add_verdict(Table& tab, const std::string& candidate, const std::string& condition, const ConditionVerdict& v,
                 double value) {
  tab.add({candidate, condition, status_of(v), value, v.tolerance_used, v.note});
}

struct Candidate {
  std::string name;
  double lambda = 1.0;
  Vec psi_T;
};

// Rows shared by every example: classical limits, maximum condition and the
// costate decomposition for each candidate multiplier.
void costate_rows(Table& tab, const ControlProblem& problem, const Trajectory& traj, const ControlSignal& control,
                  const TransitionOperator& transition, std::span<const JxRecord> jx, const Candidate& cand,
                  double T, int resolution, double tol) {
  const CostatePath costate = integrate_adjoint(problem, traj, control, T, cand.psi_T, cand.lambda);
  const ClassicalReport cl = check_classical(problem, traj, control, costate, cand.lambda, transition);
  add_verdict(tab, cand.name, "tcPSI", cl.psi_to_zero, last_value(cl.psi_to_zero));
  add_verdict(tab, cand.name, "tcXPSI", cl.state_costate, last_value(cl.state_costate));
  add_verdict(tab, cand.name, "tcM", cl.hamiltonian, last_value(cl.hamiltonian));
  add_verdict(tab, cand.name, "tcKAV", cl.transported, last_value(cl.transported));
  const auto times = uniform_grid(traj.t_begin(), T, 401);
  const ConditionVerdict mp = check_max_principle(problem, traj, control, costate, cand.lambda, resolution, times, tol);
  double worst = 0.0;
  for (const auto& [t, gap] : mp.diagnostic_series) worst = std::max(worst, gap);
  add_verdict(tab, cand.name, "max_principle", mp, worst);
  const CostateDecomposition dec = decompose_costate(costate, transition, jx, cand.lambda);
  add_verdict(tab, cand.name, "costate_decomposition", dec.verdict, dec.residual);
  if (problem.name == "integrator") {
    ConditionVerdict v;
    const double psi0 = costate.psi(traj.t_begin())[0];
    v.status = psi0 >= -tol ? Status::holds : Status::fails;
    v.tolerance_used = tol;
    v.note = "psi(0) >= 0 reading of the OO condition";
    add_verdict(tab, cand.name, "psi0_nonnegative", v, psi0);
  }
}

void general_rows(Table& tab, const ControlProblem& problem, const Trajectory& traj, const ControlSignal& control,
                  double T, int resolution, double tol) {
  const std::vector<double> taus{0.0, 1.0, 2.0};
  const double spacing = T > 500.0 ? 0.1 : 0.05;
  const auto T_grid = uniform_grid_spacing(0.0, T, spacing);
  const JxRecord jx0 = accumulate_jx(problem, traj, control, 0.0, default_horizon_grid(0.0, T));
  const auto [bounded, m] = check_jx_bounded(jx0);
  add_verdict(tab, "u_hat", "jx_bounded", bounded, m);
  const LimitCostate lc = limit_costate(jx0);
  add_verdict(tab, "u_hat", "limit_costate", lc.verdict,
              lc.psi_hat ? lc.psi_hat->lpNorm<Eigen::Infinity>() : std::numeric_limits<double>::quiet_NaN());
  for (GeneralMode mode : {GeneralMode::woo, GeneralMode::oo}) {
    const GeneralConditionReport rep =
        check_general(problem, traj, control, taus, resolution, T_grid, mode, tol);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : rep.cells) worst = std::max(worst, c.estimate);
    add_verdict(tab, "u_hat", mode == GeneralMode::woo ? "prop1_woo" : "prop1_oo", rep.verdict, worst);
  }
}

std::vector<JxRecord> jx_records(const ControlProblem& problem, const Trajectory& traj, const ControlSignal& control,
                                 double T) {
  std::vector<JxRecord> out;
  for (double tau : {0.0, 1.0, 2.0}) out.push_back(accumulate_jx(problem, traj, control, tau, default_horizon_grid(tau, T)));
  return out;
}

struct RamseySetup {
  RamseyParams params;
  ControlProblem problem;
  ShootResult shot;
  Trajectory state;
};

RamseySetup ramsey_setup(const RunConfig& config, double T) {
  const ParamMap pm = config.effective_params();
  RamseySetup s{RamseyParams::from(pm), make_builtin_problem(BuiltinExample::ramsey, pm), {}, {}};
  RamseySettings rs;
  rs.T_max = std::max(T, 2000.0);
  s.shot = ramsey_shoot(s.params, rs);
  s.state = solve_state(s.problem, s.shot.control, 0.0, s.problem.initial_state, T, precise_settings());
  if (s.state.exit_event()) throw IntegrationError("ramsey: saddle-path state leaves k > 0");
  return s;
}

GmaxCandidate ramsey_candidate(const RamseySetup& s, double c0, double T) {
  const Trajectory path = ramsey_euler_path(s.params, s.params.k0, c0, T);
  ControlSignal control = ramsey_path_control(path);
  Trajectory state = solve_state(s.problem, control, 0.0, s.problem.initial_state, T, precise_settings());
  return {std::move(state), std::move(control)};
}

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return std::to_string(std::get<long long>(c));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void RunConfig::validate() const {
  if (t_max < 0.0 || !std::isfinite(t_max)) throw std::invalid_argument("--t-max must be positive");
  if (grid < 0) throw std::invalid_argument("--grid must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (!(k_hi > k_lo) || !(c_hi > c_lo) || k_lo < 0.0 || c_lo < 0.0) {
    throw std::invalid_argument("phase-diagram ranges must satisfy 0 <= lo < hi");
  }
  if (horizon < 0.0) throw std::invalid_argument("--horizon must be positive");
}

double RunConfig::effective_t_max() const {
  if (t_max > 0.0) return t_max;
  return example == BuiltinExample::ramsey ? 2000.0 : 400.0;
}

ParamMap RunConfig::effective_params() const {
  ParamMap p = example_defaults(example);
  for (const auto& [k, v] : params) p[k] = v;
  return p;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

std::string to_csv(const ReportTable& table) {
  std::string out = "schema";
  for (const auto& c : table.columns) out += "," + csv_escape(c);
  out += "\n";
  for (const auto& row : table.rows) {
    out += table.schema;
    for (const auto& cell : row) out += "," + csv_escape(cell_text(cell));
    out += "\n";
  }
  return out;
}

std::string to_json(const ReportTable& table) {
  nlohmann::ordered_json doc;
  doc["schema"] = table.schema;
  doc["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      const Cell& c = row[i];
      if (const auto* s = std::get_if<std::string>(&c)) {
        obj[table.columns[i]] = *s;
      } else if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) {
          obj[table.columns[i]] = std::stod(format_number(*d));
        } else {
          obj[table.columns[i]] = nullptr;
        }
      } else {
        obj[table.columns[i]] = std::get<long long>(c);
      }
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

ReportTable cmd_check(const RunConfig& config) {
  config.validate();
  Table tab;
  tab.t.schema = "horizon_check_report_v1";
  tab.t.columns = {"candidate", "condition", "status", "value", "tolerance", "note"};
  const double T = config.effective_t_max();
  const int resolution = config.grid > 0 ? config.grid : 33;
  const ParamMap pm = config.effective_params();

  switch (config.example) {
    case BuiltinExample::oscillator: {
      const ControlProblem problem = make_builtin_problem(config.example, pm);
      const double b = pm.at("b");
      const OscillatorReference ref(b);
      const ControlSignal control = ControlSignal::constant(vec1(1.0));
      const Trajectory traj = solve_state(problem, control, 0.0, problem.initial_state, T, precise_settings());
      const TransitionOperator transition = transition_matrix(problem, traj, control, 0.0);
      const auto jx = jx_records(problem, traj, control, T);
      std::vector<std::tuple<std::string, double, double>> family{{"generic", std::min(0.25, 0.5 * b), 0.7},
                                                                  {"r_sin_phi_eq_minus_b", b, -kPi / 2}};
      if (b >= 1.0) family.emplace_back("r1_phi0", 1.0, 0.0);
      for (const auto& [name, r, phi] : family) {
        costate_rows(tab, problem, traj, control, transition, jx, {name, 1.0, ref.psi(r, phi, T)}, T, resolution,
                     config.tol);
      }
      general_rows(tab, problem, traj, control, T, resolution, config.tol);
      break;
    }
    case BuiltinExample::integrator: {
      const ControlProblem problem = make_builtin_problem(config.example, pm);
      const double rho = pm.at("rho");
      const double a0 = pm.at("a0");
      const double lambda = pm.at("lambda");
      const ControlSignal control = ControlSignal::constant(vec1(1.0));
      const Trajectory traj = solve_state(problem, control, 0.0, problem.initial_state, T, precise_settings());
      const TransitionOperator transition = transition_matrix(problem, traj, control, 0.0);
      const auto jx = jx_records(problem, traj, control, T);
      if (lambda > 0.0) {
        const IntegratorReference ref(rho, a0, lambda);
        costate_rows(tab, problem, traj, control, transition, jx, {"normal", lambda, vec1(ref.psi(T))}, T,
                     resolution, config.tol);
      }
      const double a0_abnormal = a0 > 0.0 ? a0 : 1.0;
      costate_rows(tab, problem, traj, control, transition, jx, {"abnormal", 0.0, vec1(a0_abnormal)}, T, resolution,
                   config.tol);
      general_rows(tab, problem, traj, control, T, resolution, config.tol);
      break;
    }
    case BuiltinExample::ramsey: {
      const RamseySetup s = ramsey_setup(config, T);
      const TransitionOperator transition = transition_matrix(s.problem, s.state, s.shot.control, 0.0);
      const auto jx = jx_records(s.problem, s.state, s.shot.control, T);
      const double c_T = s.shot.control.evaluate(T)[0];
      costate_rows(tab, s.problem, s.state, s.shot.control, transition, jx,
                   {"saddle", 1.0, vec1(std::pow(c_T, -s.params.theta))}, T, resolution, config.tol);

      std::vector<GmaxCandidate> family{{s.state, s.shot.control}};
      std::vector<std::string> names{"saddle"};
      for (double f : {0.9, 0.75, 0.5, 0.25}) {
        family.push_back(ramsey_candidate(s, f * s.shot.c0, T));
        names.push_back("c0x" + format_number(f));
      }
      family.push_back(ramsey_candidate(s, s.shot.c0 + 0.5, T));
      names.push_back("c0+0.5");
      const auto verdicts = check_gmax(s.problem, family, uniform_grid(0.0, std::min(T, 400.0), 201));
      for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const double c0 = family[i].control.evaluate(0.0)[0];
        add_verdict(tab, names[i], "gmax", verdicts[i], c0);
      }
      general_rows(tab, s.problem, s.state, s.shot.control, T, resolution, config.tol);
      break;
    }
  }
  return tab.t;
}

ReportTable cmd_phase_diagram(const RunConfig& config) {
  config.validate();
  if (config.example != BuiltinExample::ramsey) throw std::invalid_argument("phase-diagram needs --example ramsey");
  Table tab;
  tab.t.schema = "horizon_phase_diagram_v1";
  tab.t.columns = {"kind", "i", "j", "k", "c", "class"};
  const RamseyParams p = RamseyParams::from(config.effective_params());
  const RamseySteadyStates ss = ramsey_steady_state(p);
  const int n = config.grid > 0 ? config.grid : 100;
  RamseySettings rs;
  rs.T_max = config.effective_t_max();
  auto axis = [n](double lo, double hi, int i) { return lo + (hi - lo) * i / n; };

  tab.add({std::string("steady_state"), 0LL, 0LL, ss.interior.k_star, ss.interior.c_star,
           std::string("interior_saddle")});
  tab.add({std::string("steady_state"), 1LL, 0LL, ss.zero_consumption.k_star, ss.zero_consumption.c_star,
           std::string("zero_consumption")});
  for (int i = 1; i <= n; ++i) {
    const double k = axis(config.k_lo, config.k_hi, i);
    for (int j = 1; j <= n; ++j) {
      const double c = axis(config.c_lo, config.c_hi, j);
      tab.add({std::string("point"), static_cast<long long>(i), static_cast<long long>(j), k, c,
               to_string(ramsey_classify(p, k, c, rs))});
    }
  }
  for (int i = 1; i <= n; ++i) {
    const double k = axis(config.k_lo, config.k_hi, i);
    tab.add({std::string("nullcline_kdot"), static_cast<long long>(i), 0LL, k,
             std::pow(k, p.alpha) - p.delta * k, std::string()});
  }
  for (int j = 1; j <= n; ++j) {
    tab.add({std::string("nullcline_cdot"), 0LL, static_cast<long long>(j), ss.interior.k_star,
             axis(config.c_lo, config.c_hi, j), std::string()});
  }
  const ShootResult shot = ramsey_shoot(p, rs);
  const double t_show = std::min(shot.trajectory.t_end(), 2.0 * shot.ball_entry_time + 1.0);
  const auto times = uniform_grid(0.0, t_show, 201);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Vec s = shot.trajectory.evaluate(times[i]);
    tab.add({std::string("saddle_path"), static_cast<long long>(i), 0LL, s[0], s[1], std::string("saddle")});
  }
  return tab.t;
}

ReportTable cmd_overtake(const RunConfig& config) {
  config.validate();
  Table tab;
  tab.t.schema = "horizon_overtake_report_v1";
  tab.t.columns = {"challenger", "verdict", "max_gap", "argmax", "window1_max_gap", "window2_max_gap",
                   "window3_max_gap", "u_min", "u_max", "eps", "note"};
  const double T = config.effective_t_max();
  const double eps = config.tol;
  const ParamMap pm = config.effective_params();

  auto emit = [&](const std::string& name, const OvertakingReport& r) {
    std::ostringstream note;
    note << "within/above eps per window:";
    for (const auto& w : r.windows) note << " " << w.within_eps << "/" << w.above_eps;
    if (r.challenger_exit) note << "; challenger exit at t=" << format_number(r.challenger_exit->time);
    tab.add({name, to_string(r.verdict), r.max_gap, r.argmax, r.windows[0].max_gap, r.windows[1].max_gap,
             r.windows[2].max_gap, r.challenger_u_min, r.challenger_u_max, eps, note.str()});
  };

  switch (config.example) {
    case BuiltinExample::oscillator:
    case BuiltinExample::integrator: {
      const ControlProblem problem = make_builtin_problem(config.example, pm);
      const ControlSignal candidate = ControlSignal::constant(vec1(1.0));
      std::vector<std::pair<std::string, double>> delays;
      if (config.example == BuiltinExample::oscillator) {
        delays = {{"delay_pi/2", kPi / 2}, {"delay_pi", kPi}, {"delay_2pi", 2 * kPi}};
      } else {
        delays = {{"delay_1", 1.0}, {"delay_5", 5.0}};
      }
      for (const auto& [name, s] : delays) {
        const ControlSignal ch = ControlSignal::piecewise_constant({s}, {vec1(0.0), vec1(1.0)});
        emit(name, empirical_overtaking_test(problem, candidate, ch, eps, {}, T));
      }
      if (config.example == BuiltinExample::integrator) {
        emit("zero", empirical_overtaking_test(problem, candidate, ControlSignal::constant(vec1(0.0)), eps, {}, T));
      }
      break;
    }
    case BuiltinExample::ramsey: {
      const RamseySetup s = ramsey_setup(config, T);
      for (double dc : {0.5, -0.5}) {
        const double c0 = s.shot.c0 + dc;
        if (!(c0 > 0.0)) continue;
        const GmaxCandidate ch = ramsey_candidate(s, c0, T);
        emit(dc > 0 ? "c0+0.5" : "c0-0.5",
             empirical_overtaking_test(s.problem, s.shot.control, ch.control, eps, {}, T, 0.05));
      }
      break;
    }
  }
  return tab.t;
}

ReportTable cmd_needle(const RunConfig& config) {
  config.validate();
  Table tab;
  tab.t.schema = "horizon_needle_report_v1";
  tab.t.columns = {"tau", "u", "T", "alpha", "quotient", "prediction", "error", "order", "fitted_c", "min_order"};
  const ParamMap pm = config.effective_params();
  std::vector<double> alphas;
  for (int k = 0; k <= 10; ++k) alphas.push_back(0.1 * std::pow(0.5, k));

  ControlProblem problem;
  ControlSignal base;
  double tau = 1.0, u = 0.0, T = 20.0;
  switch (config.example) {
    case BuiltinExample::oscillator:
      problem = make_builtin_problem(config.example, pm);
      base = ControlSignal::constant(vec1(1.0));
      break;
    case BuiltinExample::integrator:
      problem = make_builtin_problem(config.example, pm);
      base = ControlSignal::constant(vec1(1.0));
      T = 5.0;
      break;
    case BuiltinExample::ramsey: {
      const RamseySetup s = ramsey_setup(config, std::max(config.horizon, 100.0));
      problem = s.problem;
      base = s.shot.control;
      tau = 5.0;
      T = 100.0;
      u = 0.9 * base.evaluate(tau)[0];
      break;
    }
  }
  if (config.tau >= 0.0) tau = config.tau;
  if (!std::isnan(config.u)) u = config.u;
  if (config.horizon > 0.0) T = config.horizon;
  const NeedleReport rep = needle_limit_check(problem, base, tau, vec1(u), T, alphas);
  for (const auto& row : rep.rows) {
    tab.add({tau, u, T, row.alpha, row.quotient, row.prediction, row.error, row.order, rep.fitted_c, rep.min_order});
  }
  return tab.t;
}

ReportTable cmd_list_examples() {
  ReportTable t;
  t.schema = "horizon_examples_v1";
  t.columns = {"name", "parameters", "description"};
  t.rows.push_back({std::string("ramsey"), std::string("alpha=0.4 delta=0.05 theta=0.5 k0=10 [c_max]"),
                    std::string("undiscounted growth model, k' = k^alpha - delta k - c, payoff c^(1-theta)/(1-theta)")});
  t.rows.push_back({std::string("integrator"), std::string("rho=0.1 a0=0 lambda=1"),
                    std::string("x' = u in [0,1], payoff e^(-rho t) x")});
  t.rows.push_back({std::string("oscillator"), std::string("b=0.5"),
                    std::string("x1' = x2, x2' = u - x1, u in [-1,1], payoff x2 + b u")});
  return t;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks of optimality conditions for infinite-horizon control problems", "horizon"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string example = "oscillator";
  std::string format = "csv";
  ParamMap params;
  std::vector<double> k_range, c_range;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--example", example, "ramsey | integrator | oscillator");
    sub->add_option("--t-max", cfg.t_max, "horizon (default 400, ramsey 2000)");
    sub->add_option("--grid", cfg.grid, "control resolution or phase-diagram size");
    sub->add_option("--tol", cfg.tol, "verdict tolerance / eps");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    for (const char* key : {"alpha", "delta", "theta", "k0", "c_max", "b", "rho", "a0", "lambda"}) {
      std::string flag = std::string("--") + key;
      for (auto& ch : flag) {
        if (ch == '_') ch = '-';
      }
      sub->add_option_function<double>(flag, [&params, key](const double& v) { params[key] = v; },
                                       std::string("example parameter ") + key);
    }
  };
  CLI::App* check = app.add_subcommand("check", "evaluate the condition battery");
  CLI::App* phase = app.add_subcommand("phase-diagram", "classify a (k, c) grid for the ramsey example");
  CLI::App* overtake = app.add_subcommand("overtake", "empirical overtaking tests against challenger families");
  CLI::App* needle = app.add_subcommand("needle", "needle-variation difference quotients");
  CLI::App* list = app.add_subcommand("list-examples", "list builtin examples");
  for (CLI::App* sub : {check, phase, overtake, needle}) add_common(sub);
  list->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  list->add_option("--out", cfg.out, "output file (default stdout)");
  needle->add_option("--tau", cfg.tau, "needle time");
  needle->add_option("--u", cfg.u, "needle control value");
  needle->add_option("--horizon", cfg.horizon, "payoff horizon T");
  phase->add_option("--k-range", k_range, "lo hi")->expected(2);
  phase->add_option("--c-range", c_range, "lo hi")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    cfg.example = parse_example(example);
    cfg.params = params;
    cfg.format = format == "json" ? Format::json : Format::csv;
    if (k_range.size() == 2) {
      cfg.k_lo = k_range[0];
      cfg.k_hi = k_range[1];
    }
    if (c_range.size() == 2) {
      cfg.c_lo = c_range[0];
      cfg.c_hi = c_range[1];
    }
    ReportTable table;
    if (check->parsed()) {
      table = cmd_check(cfg);
    } else if (phase->parsed()) {
      table = cmd_phase_diagram(cfg);
    } else if (overtake->parsed()) {
      table = cmd_overtake(cfg);
    } else if (needle->parsed()) {
      table = cmd_needle(cfg);
    } else {
      table = cmd_list_examples();
    }
    const std::string text = cfg.format == Format::json ? to_json(table) : to_csv(table);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) {
        err << "error: cannot open " << cfg.out << "\n";
        return 2;
      }
      f << text;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"horizon"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace horizon::cli
