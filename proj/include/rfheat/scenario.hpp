#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfheat/config.hpp"
#include "rfheat/cutoff.hpp"
#include "rfheat/harnack.hpp"

namespace rfheat {

/// Everything a run needs, parsed and validated from one config file.
struct Scenario {
  std::string name = "scenario";

  bool has_model = false;
  ManifoldModel model;

  FlowKind flow = FlowKind::homothetic;
  double T = 0.2;
  int flow_steps = 100;
  double v0_amp = 0.0;  // conformal flow: v0 = v0_amp * cos(theta)

  std::string init = "modal";  // modal|constant|torus_mode|bump|cap_mode
  std::vector<double> modes{2.0, 1.0};
  double value = 1.0;
  double base = 1.0, amplitude = 0.5;
  int mode = 1;
  double sigma = 0.1, floor_level = 1e-3, center = 0.0;
  std::string solver = "auto";  // auto|spectral|fd
  int heat_steps = 200;
  double shift = 0.0;

  std::vector<std::string> checkers;

  // checker parameters; negative means "derive from the trajectory"
  double k = -1.0, k1 = -1.0, k2 = -1.0;
  std::vector<double> alphas{2.0};
  double rho = 1.0;
  double tau = -1.0;  // default: T
  std::uint64_t seed = 1;
  int trials = 10000;
  std::vector<int> dims{2, 3, 4};
  double gamma_x2 = -1.0, gamma_t1 = -1.0, gamma_t2 = -1.0;
  double cutoff_rho = 1.0, cutoff_tau = 0.1, cutoff_T = 0.2;
};

namespace detail {

inline const std::set<std::string>& known_checkers() {
  static const std::set<std::string> ids = {
      "space_only_global", "p_nonpositive",   "space_only_fit",  "w_lemma",
      "f_lemma",           "liyau_global",    "f1_max_bound",    "space_time_fit",
      "space_only_boundary", "liyau_boundary", "square_completion", "harnack_global",
      "harnack_alpha",     "gamma_closed_form", "umbilic_lambda", "cutoff"};
  return ids;
}

inline bool checker_needs_solution(const std::string& id) {
  return id != "square_completion" && id != "cutoff" && id != "gamma_closed_form" &&
         id != "umbilic_lambda";
}

inline bool checker_needs_trajectory(const std::string& id) {
  return id != "square_completion" && id != "cutoff";
}

}  // namespace detail

inline Scenario parse_scenario(const ConfigFile& cfg) {
  Scenario sc;
  sc.name = cfg.get("run", "name", "scenario");

  if (cfg.sections.count("model")) {
    sc.has_model = true;
    const std::string kind = cfg.require("model", "kind");
    if (kind == "round_sphere")
      sc.model.kind = ModelKind::round_sphere;
    else if (kind == "flat_torus")
      sc.model.kind = ModelKind::flat_torus;
    else if (kind == "axisym_conformal_sphere")
      sc.model.kind = ModelKind::axisym_conformal_sphere;
    else if (kind == "spherical_cap")
      sc.model.kind = ModelKind::spherical_cap;
    else
      throw ConfigError("field [model] kind: unknown kind '" + kind + "'",
                        cfg.line_of("model", "kind"));
    sc.model.dim = cfg.get_int("model", "dim", 2);
    sc.model.grid_n = cfg.get_int("model", "grid", 256);
    sc.model.radius = cfg.get_double("model", "radius", 1.0);
    sc.model.theta0 = cfg.get_double("model", "theta0", kPi / 2.0);
    sc.model.period = cfg.get_double("model", "period", 2.0 * kPi);
    sc.model.boundary = (sc.model.kind == ModelKind::spherical_cap);
    try {
      sc.model.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("section [model]: ") + e.what());
    }
  }

  const std::string flow = cfg.get("flow", "kind", "homothetic");
  if (flow == "homothetic")
    sc.flow = FlowKind::homothetic;
  else if (flow == "conformal")
    sc.flow = FlowKind::conformal;
  else if (flow == "static")
    sc.flow = FlowKind::static_metric;
  else
    throw ConfigError("field [flow] kind: unknown kind '" + flow + "'",
                      cfg.line_of("flow", "kind"));
  sc.T = cfg.get_double("flow", "T", 0.2);
  if (sc.T <= 0.0) throw ConfigError("field [flow] T: must be positive", cfg.line_of("flow", "T"));
  sc.flow_steps = cfg.get_int("flow", "steps", 100);
  sc.v0_amp = cfg.get_double("flow", "v0_amplitude", 0.0);

  sc.init = cfg.get("heat", "initial", "modal");
  const std::set<std::string> inits = {"modal", "constant", "torus_mode", "bump", "cap_mode"};
  if (!inits.count(sc.init))
    throw ConfigError("field [heat] initial: unknown catalogue id '" + sc.init + "'",
                      cfg.line_of("heat", "initial"));
  sc.modes = cfg.get_doubles("heat", "modes", sc.modes);
  sc.value = cfg.get_double("heat", "value", 1.0);
  sc.base = cfg.get_double("heat", "base", 1.0);
  sc.amplitude = cfg.get_double("heat", "amplitude", 0.5);
  sc.mode = cfg.get_int("heat", "mode", 1);
  sc.sigma = cfg.get_double("heat", "sigma", 0.1);
  sc.floor_level = cfg.get_double("heat", "floor", 1e-3);
  sc.center = cfg.get_double("heat", "center", 0.0);
  sc.solver = cfg.get("heat", "solver", "auto");
  if (sc.solver != "auto" && sc.solver != "spectral" && sc.solver != "fd")
    throw ConfigError("field [heat] solver: expected auto|spectral|fd",
                      cfg.line_of("heat", "solver"));
  sc.heat_steps = cfg.get_int("heat", "steps", 200);
  sc.shift = cfg.get_double("heat", "shift", 0.0);

  sc.checkers = cfg.get_words("checks", "list");
  for (const auto& id : sc.checkers) {
    if (!detail::known_checkers().count(id))
      throw ConfigError("field [checks] list: unknown checker '" + id + "'",
                        cfg.line_of("checks", "list"));
    if (detail::checker_needs_trajectory(id) && !sc.has_model)
      throw ConfigError("field [checks] list: checker '" + id + "' requires a [model] section",
                        cfg.line_of("checks", "list"));
  }

  sc.k = cfg.get_double("params", "k", -1.0);
  sc.k1 = cfg.get_double("params", "k1", -1.0);
  sc.k2 = cfg.get_double("params", "k2", -1.0);
  sc.alphas = cfg.get_doubles("params", "alpha", sc.alphas);
  sc.rho = cfg.get_double("params", "rho", 1.0);
  sc.tau = cfg.get_double("params", "tau", -1.0);
  sc.seed = static_cast<std::uint64_t>(cfg.get_int("params", "seed", 1));
  sc.trials = cfg.get_int("params", "trials", 10000);
  {
    auto dd = cfg.get_doubles("params", "dims", {});
    if (!dd.empty()) {
      sc.dims.clear();
      for (double d : dd) sc.dims.push_back(static_cast<int>(d));
    }
  }
  sc.gamma_x2 = cfg.get_double("params", "gamma_x2", -1.0);
  sc.gamma_t1 = cfg.get_double("params", "gamma_t1", -1.0);
  sc.gamma_t2 = cfg.get_double("params", "gamma_t2", -1.0);
  sc.cutoff_rho = cfg.get_double("params", "cutoff_rho", 1.0);
  sc.cutoff_tau = cfg.get_double("params", "cutoff_tau", 0.1);
  sc.cutoff_T = cfg.get_double("params", "cutoff_T", 0.2);

  const bool wants_alpha_fit =
      std::count(sc.checkers.begin(), sc.checkers.end(), "space_time_fit") ||
      std::count(sc.checkers.begin(), sc.checkers.end(), "harnack_alpha");
  if (wants_alpha_fit)
    for (double a : sc.alphas)
      if (a <= 1.0)
        throw ConfigError("field [params] alpha: space-time fit requires alpha > 1",
                          cfg.line_of("params", "alpha"));
  if (sc.tau > 0.0 && sc.tau > sc.T + 1e-12)
    throw ConfigError("field [params] tau: must lie in (0, T]", cfg.line_of("params", "tau"));
  if (sc.cutoff_tau <= 0.0 || sc.cutoff_tau > sc.cutoff_T)
    throw ConfigError("field [params] cutoff_tau: must lie in (0, cutoff_T]",
                      cfg.line_of("params", "cutoff_tau"));
  return sc;
}

inline Scenario load_scenario(const std::string& path) { return parse_scenario(load_config(path)); }

namespace detail {

inline std::shared_ptr<MetricTrajectory> build_trajectory(const Scenario& sc) {
  if (!sc.has_model) return nullptr;
  switch (sc.flow) {
    case FlowKind::homothetic:
      return std::make_shared<MetricTrajectory>(
          evolve_homothetic(sc.model, sc.shift + sc.T, std::max(2, sc.flow_steps)));
    case FlowKind::static_metric:
      return std::make_shared<MetricTrajectory>(
          freeze_metric(sc.model, sc.shift + sc.T, std::max(2, sc.flow_steps)));
    case FlowKind::conformal: {
      std::vector<double> v0(static_cast<size_t>(sc.model.npoints()));
      const double h = sc.model.spacing();
      for (size_t i = 0; i < v0.size(); ++i) v0[i] = sc.v0_amp * std::cos(i * h);
      return std::make_shared<MetricTrajectory>(
          evolve_axisym_conformal(sc.model, v0, sc.shift + sc.T, std::max(2, sc.flow_steps)));
    }
  }
  return nullptr;
}

inline std::vector<double> initial_field(const Scenario& sc) {
  const ManifoldModel& m = sc.model;
  const int np = m.npoints();
  const double h = m.spacing();
  std::vector<double> u(np);
  if (sc.init == "constant") {
    std::fill(u.begin(), u.end(), sc.value);
  } else if (sc.init == "modal") {
    const int lmax = static_cast<int>(sc.modes.size()) - 1;
    for (int i = 0; i < np; ++i) {
      const auto p = legendre_values(lmax, std::cos(i * h));
      double acc = 0.0;
      for (int l = 0; l <= lmax; ++l) acc += sc.modes[static_cast<size_t>(l)] * p[l];
      u[i] = acc;
    }
  } else if (sc.init == "torus_mode") {
    for (int i = 0; i < np; ++i)
      u[i] = sc.base + sc.amplitude * std::cos(2.0 * kPi * sc.mode * (i * h) / m.period);
  } else if (sc.init == "bump") {
    for (int i = 0; i < np; ++i) {
      double d = std::abs(i * h - sc.center);
      if (m.periodic()) d = std::min(d, m.period - d);
      u[i] = sc.floor_level + std::exp(-d * d / (2.0 * sc.sigma * sc.sigma));
    }
  } else if (sc.init == "cap_mode") {
    for (int i = 0; i < np; ++i)
      u[i] = sc.base + sc.amplitude * std::cos(kPi * (i * h) / m.theta0);
  }
  return u;
}

inline HeatSolution build_solution(const Scenario& sc,
                                   std::shared_ptr<const MetricTrajectory> traj) {
  const bool spectral_ok = sc.model.kind == ModelKind::round_sphere && sc.model.dim == 2 &&
                           std::abs(sc.model.radius - 1.0) < 1e-14 &&
                           sc.flow == FlowKind::homothetic && sc.init == "modal";
  if (sc.solver == "spectral" && !spectral_ok)
    throw ConfigError("field [heat] solver: spectral path needs unit homothetic S^2 modal data");
  if (spectral_ok && sc.solver != "fd")
    return solve_spectral_sphere(std::move(traj), sc.modes, sc.T, sc.heat_steps, sc.shift);
  std::vector<double> u0 = initial_field(sc);
  if (sc.model.has_cap_boundary())
    return solve_neumann_cap(std::move(traj), std::move(u0), sc.T, sc.heat_steps, sc.shift);
  return solve_fd(std::move(traj), std::move(u0), sc.T, sc.heat_steps, sc.shift);
}

}  // namespace detail

struct ScenarioResult {
  std::vector<EstimateReport> reports;
  bool all_pass = true;
  std::shared_ptr<const MetricTrajectory> traj;
  HeatSolution sol;
  bool has_sol = false;
};

inline ScenarioResult run_scenario(const Scenario& sc) {
  ScenarioResult res;
  res.traj = detail::build_trajectory(sc);

  const bool needs_sol = std::any_of(sc.checkers.begin(), sc.checkers.end(),
                                     [](const std::string& id) {
                                       return detail::checker_needs_solution(id);
                                     });
  if (needs_sol) {
    res.sol = detail::build_solution(sc, res.traj);
    res.has_sol = true;
  }

  double k_meas1 = 0.0, k_meas2 = 0.0;
  if (res.traj) {
    const auto kk = ricci_range(*res.traj, sc.shift, sc.shift + sc.T);
    k_meas1 = kk.first;
    k_meas2 = kk.second;
  }
  const double k = sc.k >= 0.0 ? sc.k : k_meas2;
  const double k1 = sc.k1 >= 0.0 ? sc.k1 : k_meas1;
  const double k2 = sc.k2 >= 0.0 ? sc.k2 : k_meas2;
  const double tau = sc.tau > 0.0 ? sc.tau : sc.T;

  for (const auto& id : sc.checkers) {
    try {
      if (id == "space_only_global") {
        res.reports.push_back(check_space_only_global(res.sol));
      } else if (id == "p_nonpositive") {
        res.reports.push_back(verify_P_nonpositive(res.sol));
      } else if (id == "space_only_fit") {
        res.reports.push_back(fit_constant_space_only(res.sol, Ball{sc.rho, sc.T}, k));
      } else if (id == "w_lemma") {
        res.reports.push_back(verify_w_inequality(res.sol));
      } else if (id == "f_lemma") {
        res.reports.push_back(
            verify_F_inequality(res.sol, EstimateParams::balanced(sc.alphas.front())));
      } else if (id == "liyau_global") {
        res.reports.push_back(check_liyau_global(res.sol, k));
      } else if (id == "f1_max_bound") {
        res.reports.push_back(verify_F1_max_bound(res.sol, k, tau));
      } else if (id == "space_time_fit") {
        EstimateReport merged;
        merged.theorem = "space_time_fit";
        for (double a : sc.alphas) {
          EstimateReport r = fit_constant_space_time(res.sol, Ball{sc.rho, sc.T}, k1, k2, a);
          if (!std::isfinite(merged.fitted_constant)) merged.fitted_constant = r.fitted_constant;
          merged.extras["cprime_alpha_" + detail::fmt_g(a)] = r.fitted_constant;
          merged.t_min = r.t_min;
          merged.tolerance = std::max(merged.tolerance, r.tolerance);
          if (r.min_margin < merged.min_margin) {
            merged.min_margin = r.min_margin;
            merged.argmin_t = r.argmin_t;
            merged.argmin_coord = r.argmin_coord;
          }
          r.rows.pop_back();  // drop the per-alpha argmin row before merging
          merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
          merged.pass = r.pass && (sc.alphas.front() == a ? true : merged.pass);
        }
        merged.rows.push_back({merged.argmin_t, merged.argmin_coord, 0.0, merged.min_margin});
        res.reports.push_back(std::move(merged));
      } else if (id == "space_only_boundary") {
        res.reports.push_back(check_space_only_boundary(res.sol));
      } else if (id == "liyau_boundary") {
        res.reports.push_back(check_liyau_boundary(res.sol, k));
      } else if (id == "square_completion") {
        res.reports.push_back(random_square_completion_checks(sc.seed, sc.trials, sc.dims));
      } else if (id == "harnack_global") {
        const auto pairs = default_harnack_pairs(res.sol);
        res.reports.push_back(check_harnack_global(res.sol, k, pairs));
      } else if (id == "harnack_alpha") {
        // The hypothesis scan is global, so fit C' as a global sup rather
        // than over the half ball; rho only enters through the finite-radius
        // term kept in A2.
        const double a = sc.alphas.front();
        const int n = sc.model.dim;
        const double shift = n * k1 * a * a * a / (a - 1.0);
        const double kmax = std::max(k1, k2);
        double cp = 0.0;
        const double t_floor = detail::default_t_min(res.sol);
        for (int m = 0; m < res.sol.nsteps(); ++m) {
          FieldFrame fr = make_frame(res.sol, m);
          if (fr.t < t_floor) continue;
          const double rhs0 =
              a * a * (a * a / (sc.rho * sc.rho * (a - 1.0)) + 1.0 / fr.t + kmax);
          for (int i = 0; i < sc.model.npoints(); ++i)
            cp = std::max(cp, (fr.grad_f_sq[i] - a * fr.ft[i] - shift) / rhs0);
        }
        const auto pairs = default_harnack_pairs(res.sol);
        res.reports.push_back(
            check_harnack_alpha(res.sol, k1, k2, a, std::max(cp, 1e-6), sc.rho, pairs));
      } else if (id == "gamma_closed_form") {
        const double L = sc.model.domain_length();
        const double x2 = sc.gamma_x2 >= 0.0 ? sc.gamma_x2 : 0.5 * L;
        const double t1 = sc.gamma_t1 >= 0.0 ? sc.gamma_t1 : sc.shift + 0.25 * sc.T;
        const double t2 = sc.gamma_t2 >= 0.0 ? sc.gamma_t2 : sc.shift + 0.75 * sc.T;
        const GammaResult g = minimize_gamma(0.0, t1, x2, t2, *res.traj);
        const double closed = gamma_homothetic_closed_form(*res.traj, x2, t1, t2);
        EstimateReport rep;
        rep.theorem = "gamma_closed_form";
        rep.extras["gamma_est"] = g.gamma;
        rep.extras["gamma_closed_form"] = closed;
        rep.extras["sweeps"] = g.sweeps;
        const double relerr = std::abs(g.gamma - closed) / std::max(closed, 1e-300);
        rep.fold(t2, x2, relerr, 0.005, true);
        if (!g.converged) rep.notes.push_back("optimizer hit the sweep cap");
        rep.finish();
        rep.pass = rep.pass && g.converged;
        res.reports.push_back(std::move(rep));
      } else if (id == "umbilic_lambda") {
        const BoundaryData bd = boundary_lambda(*res.traj);
        EstimateReport rep;
        rep.theorem = "umbilic_lambda";
        for (size_t m = 0; m < bd.times.size(); ++m) {
          const double c = res.traj->scale_at(bd.times[m]);
          const double dev = std::abs(bd.lambda[m] * std::sqrt(c) - bd.lambda_scaled);
          rep.fold(bd.times[m], sc.model.theta0, dev, 1e-10, m % 10 == 0);
        }
        rep.extras["lambda_scaled"] = bd.lambda_scaled;
        rep.finish();
        res.reports.push_back(std::move(rep));
      } else if (id == "cutoff") {
        res.reports.push_back(
            verify_cutoff(build_cutoff(sc.cutoff_rho, sc.cutoff_tau, sc.cutoff_T)));
      }
    } catch (const HypothesisViolation& e) {
      EstimateReport rep;
      rep.theorem = id;
      rep.pass = false;
      rep.min_margin = 0.0;
      rep.notes.push_back(std::string("hypothesis violation: ") + e.what());
      rep.rows.push_back({0.0, 0.0, 0.0, 0.0});
      res.reports.push_back(std::move(rep));
    }
  }
  for (const auto& r : res.reports) res.all_pass = res.all_pass && r.pass;
  return res;
}

inline nlohmann::ordered_json summary_json(const Scenario& sc, const ScenarioResult& res) {
  nlohmann::ordered_json j;
  j["scenario"] = sc.name;
  if (sc.has_model) {
    j["model"] = to_string(sc.model.kind);
    j["dim"] = sc.model.dim;
    j["grid"] = sc.model.grid_n;
  }
  j["T"] = sc.T;
  if (res.has_sol) {
    j["initial_sup"] = res.sol.initial_sup;
    j["dt_solver"] = res.sol.dt_solver;
    if (res.sol.neumann_incompatible)
      j["warnings"] = {"initial data violates the Neumann compatibility condition"};
  }
  j["checkers"] = nlohmann::ordered_json::array();
  for (const auto& r : res.reports) {
    nlohmann::ordered_json c;
    c["theorem"] = r.theorem;
    c["pass"] = r.pass;
    c["min_margin"] = r.min_margin;
    c["argmin_t"] = r.argmin_t;
    c["argmin_coord"] = r.argmin_coord;
    c["tolerance"] = r.tolerance;
    c["t_min"] = r.t_min;
    if (std::isfinite(r.fitted_constant)) c["fitted_constant"] = r.fitted_constant;
    if (!r.extras.empty()) {
      nlohmann::ordered_json e;
      for (const auto& [key, val] : r.extras) e[key] = val;
      c["extras"] = e;
    }
    if (!r.notes.empty()) c["notes"] = r.notes;
    j["checkers"].push_back(std::move(c));
  }
  j["all_pass"] = res.all_pass;
  return j;
}

inline void write_outputs(const Scenario& sc, const ScenarioResult& res,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& r : res.reports)
    write_report_csv(r, out_dir + "/" + r.theorem + ".csv");
  std::ofstream out(out_dir + "/summary.json");
  if (!out) throw std::runtime_error("cannot open " + out_dir + "/summary.json");
  out << summary_json(sc, res).dump(2) << '\n';
}

/// Field catalogue for grid dumps (external plotting): one CSV row per
/// stored (t, coord) sample.
inline void dump_field(const Scenario& sc, const std::string& field, std::ostream& out) {
  static const std::set<std::string> known = {"u",  "f",  "ut", "ft",
                                              "gradsq_u", "gradsq_f", "P", "w",
                                              "F1", "space_only_margin", "liyau_margin"};
  if (!known.count(field)) throw ConfigError("unknown dump field id '" + field + "'");
  if (!sc.has_model) throw ConfigError("dump requires a [model] section");
  auto traj = detail::build_trajectory(sc);
  HeatSolution sol = detail::build_solution(sc, traj);
  const double A = sup_initial(sol);
  double k = sc.k;
  if (k < 0.0) k = ricci_range(*traj, sc.shift, sc.shift + sc.T).second;
  const int n = sc.model.dim;
  const double h = sc.model.spacing();

  out << "# rfheat-dump v1: t,coord,value\n";
  out << "t,coord,value\n";
  for (int m = 0; m < sol.nsteps(); ++m) {
    FieldFrame fr = make_frame(sol, m);
    for (int i = 0; i < sc.model.npoints(); ++i) {
      double v = 0.0;
      if (field == "u")
        v = fr.u[i];
      else if (field == "f")
        v = fr.f[i];
      else if (field == "ut")
        v = fr.ut[i];
      else if (field == "ft")
        v = fr.ft[i];
      else if (field == "gradsq_u")
        v = fr.grad_u_sq[i];
      else if (field == "gradsq_f")
        v = fr.grad_f_sq[i];
      else if (field == "P")
        v = fr.t * fr.grad_u_sq[i] / fr.u[i] - fr.u[i] * std::log(A / fr.u[i]);
      else if (field == "w") {
        const double s = 1.0 - (fr.f[i] - std::log(A));
        v = fr.grad_f_sq[i] / (s * s);
      } else if (field == "F1")
        v = fr.t * (fr.grad_f_sq[i] - fr.ft[i]);
      else if (field == "space_only_margin") {
        const double lhs = std::sqrt(fr.grad_u_sq[i]) / fr.u[i];
        const double rhs =
            fr.t > 0.0 ? std::sqrt(std::max(0.0, std::log(A / fr.u[i]) / fr.t)) : 0.0;
        v = rhs - lhs;
      } else if (field == "liyau_margin") {
        const double rhs = fr.t > 0.0 ? k * n + n / (2.0 * fr.t) : 0.0;
        v = rhs - (fr.grad_f_sq[i] - fr.ft[i]);
      }
      out << detail::fmt_g(fr.t) << ',' << detail::fmt_g(i * h) << ',' << detail::fmt_g(v)
          << '\n';
    }
  }
}

}  // namespace rfheat
