#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "rfheat/heat_solver.hpp"
#include "rfheat/report.hpp"

namespace rfheat {

/// Parameter pack for the F-style checkers: alpha >= 1 and the split
/// a + b = 1/alpha of the square-completion weight.
struct EstimateParams {
  double alpha = 1.0;
  double a = 0.5;
  double b = 0.5;

  static EstimateParams balanced(double alpha) {
    EstimateParams p;
    p.alpha = alpha;
    p.a = p.b = 0.5 / alpha;
    return p;
  }

  void validate() const {
    if (alpha < 1.0) throw std::invalid_argument("estimate params: alpha must be >= 1");
    if (!(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("estimate params: a, b must be positive");
    if (std::abs(a + b - 1.0 / alpha) > 1e-12)
      throw std::invalid_argument("estimate params: a + b must equal 1/alpha");
  }
};

/// Derived pointwise quantities at one stored time: f = log u, u_t through
/// the PDE, f_t = u_t/u, and the squared gradients of u and f.
struct FieldFrame {
  double t = 0.0;       // time since the solution's start (the estimates' t)
  double t_flow = 0.0;  // trajectory time used to evaluate the metric
  MetricState st;
  std::vector<double> u, f, ut, ft, grad_u_sq, grad_f_sq;
};

inline FieldFrame make_frame(const HeatSolution& sol, int m) {
  FieldFrame fr;
  fr.t_flow = sol.times[static_cast<size_t>(m)];
  fr.t = fr.t_flow - sol.time_shift;
  fr.st = sol.traj->at(fr.t_flow);
  fr.u = sol.at(m);
  const ManifoldModel& model = sol.model();
  const int np = model.npoints();
  fr.f.resize(np);
  for (int i = 0; i < np; ++i) fr.f[i] = std::log(fr.u[i]);
  fr.ut = laplace_beltrami(model, fr.st, fr.u);
  fr.ft.resize(np);
  for (int i = 0; i < np; ++i) fr.ft[i] = fr.ut[i] / fr.u[i];
  fr.grad_u_sq = grad_norm_sq(model, fr.st, fr.u);
  fr.grad_f_sq = grad_norm_sq(model, fr.st, fr.f);
  return fr;
}

namespace detail {

// Checkers skip t < 2*dt_store: the 1/t factors amplify discretization
// noise right after the initial time.
inline double default_t_min(const HeatSolution& sol) { return 2.0 * sol.dt_store(); }

// tol = kappa*(dt + h^2)*scale with kappa = 10, calibrated on the exact
// spectral solutions; time-differenced quantities add dt_store.
inline constexpr double kTolKappa = 10.0;

inline double tol_space(const HeatSolution& sol, double scale) {
  const double h = sol.model().spacing();
  return kTolKappa * (sol.dt_solver + h * h) * scale;
}

inline double tol_time_differenced(const HeatSolution& sol, double scale) {
  const double h = sol.model().spacing();
  return kTolKappa * (sol.dt_solver + sol.dt_store() + h * h) * scale;
}

// One-sided boundary stencils are only first-order in h.
inline double tol_boundary(const HeatSolution& sol, double scale) {
  const double h = sol.model().spacing();
  return kTolKappa * (sol.dt_solver + h) * scale;
}

inline int time_stride(const HeatSolution& sol) { return std::max(1, sol.nsteps() / 25); }

inline std::vector<FieldFrame> make_frames(const HeatSolution& sol) {
  std::vector<FieldFrame> fr;
  fr.reserve(static_cast<size_t>(sol.nsteps()));
  for (int m = 0; m < sol.nsteps(); ++m) fr.push_back(make_frame(sol, m));
  return fr;
}

// d/dt of a per-time field by centered differences on the stored grid.
inline std::vector<double> centered_dt(const std::vector<std::vector<double>>& fields, int m,
                                       double dt) {
  const auto& a = fields[static_cast<size_t>(m - 1)];
  const auto& b = fields[static_cast<size_t>(m + 1)];
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (b[i] - a[i]) / (2.0 * dt);
  return out;
}

inline double ball_injectivity_limit(const MetricTrajectory& traj) {
  const ManifoldModel& m = traj.model;
  if (m.kind == ModelKind::flat_torus) return 0.5 * m.period;
  double lim = 1e300;
  for (double t : traj.times) lim = std::min(lim, distance(traj, 0.0, m.domain_length(), t));
  return lim;
}

}  // namespace detail

/// Global space-only gradient bound: |grad u|/u <= sqrt((1/t) log(A/u)) on
/// closed models with A = sup of the initial data.
inline EstimateReport check_space_only_global(const HeatSolution& sol,
                                              const std::string& theorem_id = "space_only_global") {
  EstimateReport rep;
  rep.theorem = theorem_id;
  rep.t_min = detail::default_t_min(sol);
  const double A = sup_initial(sol);
  const int stride = detail::time_stride(sol);
  double qscale = 1.0;
  for (int m = 0; m < sol.nsteps(); ++m) {
    FieldFrame fr = make_frame(sol, m);
    if (fr.t < rep.t_min) continue;
    const ManifoldModel& model = sol.model();
    for (int i = 0; i < model.npoints(); ++i) {
      const double lhs = std::sqrt(fr.grad_u_sq[i]) / fr.u[i];
      const double rhs = std::sqrt(std::max(0.0, std::log(A / fr.u[i]) / fr.t));
      qscale = std::max(qscale, std::max(lhs, rhs));
      rep.fold(fr.t, i * model.spacing(), lhs, rhs, m % stride == 0);
    }
  }
  rep.tolerance = detail::tol_space(sol, qscale);
  rep.finish();
  return rep;
}

/// The auxiliary function P = t|grad u|^2/u - u log(A/u) from the proof of
/// the global space-only bound: P <= 0 on the grid, and the heat-operator
/// residual (Lap - d/dt)P, measured with independent finite differences,
/// stays >= -tol.
inline EstimateReport verify_P_nonpositive(const HeatSolution& sol,
                                           const std::string& theorem_id = "p_nonpositive") {
  EstimateReport rep;
  rep.theorem = theorem_id;
  rep.t_min = detail::default_t_min(sol);
  const double A = sup_initial(sol);
  const ManifoldModel& model = sol.model();
  const int np = model.npoints();
  const int M = sol.nsteps();
  const int stride = detail::time_stride(sol);

  const auto frames = detail::make_frames(sol);
  std::vector<std::vector<double>> P(static_cast<size_t>(M));
  for (int m = 0; m < M; ++m) {
    P[m].resize(np);
    for (int i = 0; i < np; ++i)
      P[m][i] = frames[m].t * frames[m].grad_u_sq[i] / frames[m].u[i] -
                frames[m].u[i] * std::log(A / frames[m].u[i]);
  }

  double qscale = 1.0;
  for (int m = 0; m < M; ++m) {
    const FieldFrame& fr = frames[m];
    if (fr.t < rep.t_min) continue;
    const bool interior = (m > 0 && m < M - 1);
    std::vector<double> lapP, Pt;
    if (interior) {
      lapP = laplace_beltrami(model, fr.st, P[m]);
      Pt = detail::centered_dt(P, m, sol.dt_store());
    }
    for (int i = 0; i < np; ++i) {
      qscale = std::max(qscale, std::abs(P[m][i]));
      rep.fold(fr.t, i * model.spacing(), P[m][i], 0.0, m % stride == 0);
      if (interior) {
        const double res = lapP[i] - Pt[i];
        qscale = std::max(qscale, std::abs(lapP[i]) + std::abs(Pt[i]));
        rep.fold(fr.t, i * model.spacing(), -res, 0.0, false);
      }
    }
  }
  rep.tolerance = detail::tol_time_differenced(sol, qscale);
  rep.finish();
  return rep;
}

/// Fits the smallest C making |grad u|/u <= C(1/rho + 1/sqrt(t) + sqrt(k))
/// (1 + log(A/u)) hold on the half ball; A is the sup of u over the full
/// parabolic ball.
inline EstimateReport fit_constant_space_only(const HeatSolution& sol, const Ball& ball, double k,
                                              const std::string& theorem_id = "space_only_fit") {
  EstimateReport rep;
  rep.theorem = theorem_id;
  rep.t_min = detail::default_t_min(sol);
  const MetricTrajectory& traj = *sol.traj;
  if (ball.rho >= detail::ball_injectivity_limit(traj))
    throw std::invalid_argument("fit_constant_space_only: ball exceeds the injectivity radius");
  const auto [k1m, k2m] = ricci_range(traj, sol.times.front(), sol.times.back());
  if (std::max(k1m, k2m) > k + 1e-9)
    throw HypothesisViolation("fit_constant_space_only: measured |Ric| bound " +
                              std::to_string(std::max(k1m, k2m)) + " exceeds supplied k");

  const ManifoldModel& model = sol.model();
  const int np = model.npoints();
  const auto frames = detail::make_frames(sol);

  double A = 0.0;
  for (const auto& fr : frames)
    for (int i = 0; i < np; ++i)
      if (distance(traj, 0.0, i * model.spacing(), fr.t_flow) < ball.rho)
        A = std::max(A, fr.u[i]);

  struct Pt {
    double t, coord, lhs, rhs0;
  };
  std::vector<Pt> pts;
  double cmin = 0.0;
  for (const auto& fr : frames) {
    if (fr.t < rep.t_min) continue;
    const double base = 1.0 / ball.rho + 1.0 / std::sqrt(fr.t) + std::sqrt(k);
    for (int i = 0; i < np; ++i) {
      const double th = i * model.spacing();
      if (distance(traj, 0.0, th, fr.t_flow) >= 0.5 * ball.rho) continue;
      const double lhs = std::sqrt(fr.grad_u_sq[i]) / fr.u[i];
      const double rhs0 = base * (1.0 + std::log(A / fr.u[i]));
      pts.push_back({fr.t, th, lhs, rhs0});
      if (rhs0 > 0.0) cmin = std::max(cmin, lhs / rhs0);
    }
  }
  rep.fitted_constant = cmin;
  const size_t stride = std::max<size_t>(1, pts.size() / 400);
  for (size_t j = 0; j < pts.size(); ++j)
    rep.fold(pts[j].t, pts[j].coord, pts[j].lhs, cmin * pts[j].rhs0, j % stride == 0);
  rep.tolerance = detail::tol_space(sol, 1.0);
  rep.finish();
  rep.pass = std::isfinite(cmin) && !pts.empty();
  return rep;
}

/// Evolution inequality for w = |grad f|^2/(1-f)^2 after the u -> u/A
/// normalization: (Lap - d/dt)w >= (2f/(1-f)) grad f . grad w + 2(1-f)w^2.
inline EstimateReport verify_w_inequality(const HeatSolution& sol,
                                          const std::string& theorem_id = "w_lemma") {
  EstimateReport rep;
  rep.theorem = theorem_id;
  rep.t_min = detail::default_t_min(sol);
  const double A = sup_initial(sol);
  const ManifoldModel& model = sol.model();
  const int np = model.npoints();
  const int M = sol.nsteps();
  const int stride = detail::time_stride(sol);

  const auto frames = detail::make_frames(sol);
  std::vector<std::vector<double>> f(static_cast<size_t>(M)), w(static_cast<size_t>(M));
  const double logA = std::log(A);
  for (int m = 0; m < M; ++m) {
    f[m].resize(np);
    w[m].resize(np);
    for (int i = 0; i < np; ++i) {
      f[m][i] = frames[m].f[i] - logA;  // log(u/A) <= 0 up to solver noise
      const double s = 1.0 - f[m][i];
      w[m][i] = frames[m].grad_f_sq[i] / (s * s);
    }
  }

  double qscale = 1.0;
  for (int m = 1; m < M - 1; ++m) {
    const FieldFrame& fr = frames[m];
    if (fr.t < rep.t_min) continue;
    const auto lapw = laplace_beltrami(model, fr.st, w[m]);
    const auto wt = detail::centered_dt(w, m, sol.dt_store());
    const auto fw = grad_inner(model, fr.st, f[m], w[m]);
    for (int i = 0; i < np; ++i) {
      const double s = 1.0 - f[m][i];
      const double lhs = lapw[i] - wt[i];
      const double rhs = (2.0 * f[m][i] / s) * fw[i] + 2.0 * s * w[m][i] * w[m][i];
      qscale = std::max(qscale, std::abs(lapw[i]) + std::abs(wt[i]) + std::abs(rhs));
      rep.fold(fr.t, i * model.spacing(), rhs, lhs, m % stride == 0);
    }
  }
  rep.tolerance = detail::tol_time_differenced(sol, qscale);
  rep.finish();
  return rep;
}

/// Evolution inequality for F = t(|grad f|^2 - alpha f_t): the residual of
///   (Lap - d/dt)F >= -2 grad f . grad F + (2 a alpha t/n)(|grad f|^2-f_t)^2
///                    - (|grad f|^2 - alpha f_t) - 2 k1 alpha t |grad f|^2
///                    - (alpha t n / 2b) max{k1^2, k2^2}
/// with the curvature bounds measured from the trajectory.
inline EstimateReport verify_F_inequality(const HeatSolution& sol, const EstimateParams& par,
                                          const std::string& theorem_id = "f_lemma") {
  par.validate();
  EstimateReport rep;
  rep.theorem = theorem_id;
  rep.t_min = detail::default_t_min(sol);
  const ManifoldModel& model = sol.model();
  const int n = model.dim;
  const int np = model.npoints();
  const int M = sol.nsteps();
  const int stride = detail::time_stride(sol);
  const auto [k1, k2] = ricci_range(*sol.traj, sol.times.front(), sol.times.back());
  rep.extras["k1"] = k1;
  rep.extras["k2"] = k2;
  rep.extras["alpha"] = par.alpha;

  const auto frames = detail::make_frames(sol);
  std::vector<std::vector<double>> F(static_cast<size_t>(M));
  for (int m = 0; m < M; ++m) {
    F[m].resize(np);
    for (int i = 0; i < np; ++i)
      F[m][i] = frames[m].t * (frames[m].grad_f_sq[i] - par.alpha * frames[m].ft[i]);
  }

  const double kk = std::max(k1 * k1, k2 * k2);
  double qscale = 1.0;
  for (int m = 1; m < M - 1; ++m) {
    const FieldFrame& fr = frames[m];
    if (fr.t < rep.t_min) continue;
    const auto lapF = laplace_beltrami(model, fr.st, F[m]);
    const auto Ft = detail::centered_dt(F, m, sol.dt_store());
    const auto fF = grad_inner(model, fr.st, fr.f, F[m]);
    for (int i = 0; i < np; ++i) {
      const double d = fr.grad_f_sq[i] - fr.ft[i];
      const double lhs = lapF[i] - Ft[i];
      const double rhs = -2.0 * fF[i] + (2.0 * par.a * par.alpha * fr.t / n) * d * d -
                         (fr.grad_f_sq[i] - par.alpha * fr.ft[i]) -
                         2.0 * k1 * par.alpha * fr.t * fr.grad_f_sq[i] -
                         (par.alpha * fr.t * n / (2.0 * par.b)) * kk;
      qscale = std::max(qscale, std::abs(lapF[i]) + std::abs(Ft[i]) + std::abs(rhs));
      rep.fold(fr.t, i * model.spacing(), rhs, lhs, m % stride == 0);
    }
  }
  rep.tolerance = detail::tol_time_differenced(sol, qscale);
  rep.finish();
  return rep;
}

/// Global space-time bound under 0 <= Ric <= k g:
/// |grad u|^2/u^2 - u_t/u <= kn + n/(2t).
inline EstimateReport check_liyau_global(const HeatSolution& sol, double k,
                                         const std::string& theorem_id = "liyau_global") {
  EstimateReport rep;
  rep.theorem = theorem_id;
  rep.t_min = detail::default_t_min(sol);
  const auto [k1, k2] = ricci_range(*sol.traj, sol.times.front(), sol.times.back());
  if (k1 > 1e-9)
    throw HypothesisViolation("check_liyau_global: Ricci lower bound " + std::to_string(-k1) +
                              " < 0 on the trajectory");
  if (k2 > k + 1e-9)
    throw HypothesisViolation("check_liyau_global: measured upper bound " + std::to_string(k2) +
                              " exceeds supplied k");
  const ManifoldModel& model = sol.model();
  const int n = model.dim;
  const int stride = detail::time_stride(sol);
  double qscale = 1.0;
  for (int m = 0; m < sol.nsteps(); ++m) {
    FieldFrame fr = make_frame(sol, m);
    if (fr.t < rep.t_min) continue;
    const double rhs = k * n + n / (2.0 * fr.t);
    for (int i = 0; i < model.npoints(); ++i) {
      const double lhs = fr.grad_f_sq[i] - fr.ft[i];
      qscale = std::max(qscale, std::max(std::abs(lhs), rhs));
      rep.fold(fr.t, i * model.spacing(), lhs, rhs, m % stride == 0);
    }
  }
  rep.tolerance = detail::tol_space(sol, qscale);
  rep.finish();
  return rep;
}

/// Maximum bound for F1 = t(|grad f|^2 - f_t): at its argmax over
/// M x [0,tau], F1 <= t0 k n + n/2. Also records the tightness ratio.
inline EstimateReport verify_F1_max_bound(const HeatSolution& sol, double k, double tau,
                                          const std::string& theorem_id = "f1_max_bound") {
  EstimateReport rep;
  rep.theorem = theorem_id;
  rep.t_min = detail::default_t_min(sol);
  if (tau <= 0.0) throw std::invalid_argument("verify_F1_max_bound: tau must be positive");
  const ManifoldModel& model = sol.model();
  const int n = model.dim;
  const int stride = detail::time_stride(sol);

  double f1max = 0.0, t0 = 0.0, coord0 = 0.0;
  double qscale = 1.0;
  for (int m = 0; m < sol.nsteps(); ++m) {
    FieldFrame fr = make_frame(sol, m);
    if (fr.t < rep.t_min || fr.t > tau + 1e-12) continue;
    for (int i = 0; i < model.npoints(); ++i) {
      const double F1 = fr.t * (fr.grad_f_sq[i] - fr.ft[i]);
      if (F1 > f1max) {
        f1max = F1;
        t0 = fr.t;
        coord0 = i * model.spacing();
      }
      const double bound = fr.t * k * n + 0.5 * n;
      qscale = std::max(qscale, std::max(std::abs(F1), bound));
      rep.fold(fr.t, i * model.spacing(), F1, bound, m % stride == 0);
    }
  }
  const double bound0 = t0 * k * n + 0.5 * n;
  rep.extras["f1_max"] = f1max;
  rep.extras["t0"] = t0;
  rep.extras["coord0"] = coord0;
  rep.extras["tightness"] = f1max / bound0;
  rep.tolerance = detail::tol_space(sol, qscale);
  rep.finish();
  return rep;
}

/// Fits the smallest C' making |grad u|^2/u^2 - alpha u_t/u stay below
/// C' a^2 (a^2/(rho^2(a-1)) + 1/t + max{k1,k2}) + n k1 a^3/(a-1) on the
/// half ball (a = alpha).
inline EstimateReport fit_constant_space_time(const HeatSolution& sol, const Ball& ball, double k1,
                                              double k2, double alpha,
                                              const std::string& theorem_id = "space_time_fit") {
  if (alpha <= 1.0) throw std::invalid_argument("fit_constant_space_time: alpha must be > 1");
  EstimateReport rep;
  rep.theorem = theorem_id;
  rep.t_min = detail::default_t_min(sol);
  rep.extras["alpha"] = alpha;
  const MetricTrajectory& traj = *sol.traj;
  if (ball.rho >= detail::ball_injectivity_limit(traj))
    throw std::invalid_argument("fit_constant_space_time: ball exceeds the injectivity radius");
  const auto [k1m, k2m] = ricci_range(traj, sol.times.front(), sol.times.back());
  if (k1m > k1 + 1e-9 || k2m > k2 + 1e-9)
    throw HypothesisViolation("fit_constant_space_time: measured Ricci bounds exceed (k1, k2)");

  const ManifoldModel& model = sol.model();
  const int n = model.dim;
  const int np = model.npoints();
  const double kmax = std::max(k1, k2);
  const double shift = n * k1 * alpha * alpha * alpha / (alpha - 1.0);

  struct Pt {
    double t, coord, lhs, rhs0;
  };
  std::vector<Pt> pts;
  double cmin = 0.0;
  for (int m = 0; m < sol.nsteps(); ++m) {
    FieldFrame fr = make_frame(sol, m);
    if (fr.t < rep.t_min) continue;
    const double rhs0 = alpha * alpha *
                        (alpha * alpha / (ball.rho * ball.rho * (alpha - 1.0)) + 1.0 / fr.t + kmax);
    for (int i = 0; i < np; ++i) {
      const double th = i * model.spacing();
      if (distance(traj, 0.0, th, fr.t_flow) >= 0.5 * ball.rho) continue;
      const double lhs = fr.grad_f_sq[i] - alpha * fr.ft[i];
      pts.push_back({fr.t, th, lhs, rhs0});
      cmin = std::max(cmin, (lhs - shift) / rhs0);
    }
  }
  cmin = std::max(cmin, 0.0);
  rep.fitted_constant = cmin;
  const size_t stride = std::max<size_t>(1, pts.size() / 400);
  for (size_t j = 0; j < pts.size(); ++j)
    rep.fold(pts[j].t, pts[j].coord, pts[j].lhs, cmin * pts[j].rhs0 + shift, j % stride == 0);
  rep.tolerance = detail::tol_space(sol, 1.0);
  rep.finish();
  rep.pass = std::isfinite(cmin) && !pts.empty();
  return rep;
}

namespace detail {

inline void require_cap(const HeatSolution& sol, const char* who) {
  if (!sol.model().has_cap_boundary())
    throw std::invalid_argument(std::string(who) + ": solution is not on a cap model");
}

}  // namespace detail

/// Boundary version of the space-only bound on the cap with Neumann data:
/// the global inequality including boundary points, plus the sign check
/// dP/dnu <= 0 at theta0 (the umbilic term -2(t/u) lambda |grad u|^2).
inline EstimateReport check_space_only_boundary(const HeatSolution& sol) {
  detail::require_cap(sol, "check_space_only_boundary");
  boundary_lambda(*sol.traj);  // validates lambda >= 0
  EstimateReport rep = check_space_only_global(sol, "space_only_boundary");
  rep.rows.pop_back();  // re-finish below once the boundary rows are in

  const ManifoldModel& model = sol.model();
  const double A = sup_initial(sol);
  const int N = model.npoints() - 1;
  double bscale = 1.0;
  for (int m = 0; m < sol.nsteps(); ++m) {
    FieldFrame fr = make_frame(sol, m);
    if (fr.t < rep.t_min) continue;
    std::vector<double> P(model.npoints());
    for (int i = 0; i <= N; ++i)
      P[i] = fr.t * fr.grad_u_sq[i] / fr.u[i] - fr.u[i] * std::log(A / fr.u[i]);
    const double dP = boundary_normal_derivative(model, fr.st, P);
    bscale = std::max(bscale, std::abs(dP));
    rep.fold(fr.t, model.theta0, dP, 0.0, true);
  }
  rep.tolerance = std::max(rep.tolerance, detail::tol_boundary(sol, bscale));
  rep.finish();
  return rep;
}

/// Boundary version of the global space-time bound on the cap, plus the
/// sign check dF1/dnu <= 0 at theta0 (the term -2 t lambda |grad f|^2).
inline EstimateReport check_liyau_boundary(const HeatSolution& sol, double k) {
  detail::require_cap(sol, "check_liyau_boundary");
  boundary_lambda(*sol.traj);  // validates lambda >= 0
  EstimateReport rep = check_liyau_global(sol, k, "liyau_boundary");
  rep.rows.pop_back();  // re-finish below once the boundary rows are in

  const ManifoldModel& model = sol.model();
  double bscale = 1.0;
  for (int m = 0; m < sol.nsteps(); ++m) {
    FieldFrame fr = make_frame(sol, m);
    if (fr.t < rep.t_min) continue;
    std::vector<double> F1(model.npoints());
    for (int i = 0; i < model.npoints(); ++i)
      F1[i] = fr.t * (fr.grad_f_sq[i] - fr.ft[i]);
    const double dF1 = boundary_normal_derivative(model, fr.st, F1);
    bscale = std::max(bscale, std::abs(dF1));
    rep.fold(fr.t, model.theta0, dF1, 0.0, true);
  }
  rep.tolerance = std::max(rep.tolerance, detail::tol_boundary(sol, bscale));
  rep.finish();
  return rep;
}

namespace detail {

// Random orthogonal matrix by Gram-Schmidt on Gaussian columns.
inline std::vector<std::vector<double>> random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> v(n, std::vector<double>(n));
  for (auto& col : v)
    for (auto& x : col) x = gauss(rng);
  for (int j = 0; j < n; ++j) {
    for (int p = 0; p < j; ++p) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += v[j][i] * v[p][i];
      for (int i = 0; i < n; ++i) v[j][i] -= dot * v[p][i];
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += v[j][i] * v[j][i];
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) v[j][i] /= norm;
  }
  return v;
}

struct AlgebraTrial {
  int n;
  std::vector<std::vector<double>> H;  // symmetric Hessian stand-in
  std::vector<std::vector<double>> R;  // symmetric curvature stand-in
  std::vector<double> g;               // gradient stand-in
  double f;                            // scalar, f < 0
  double alpha, a, b;
};

inline AlgebraTrial random_trial(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.05, 0.95);
  AlgebraTrial tr;
  tr.n = n;
  tr.H.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) tr.H[i][j] = tr.H[j][i] = uni(rng);
  std::uniform_real_distribution<double> band(0.0, 2.0);
  const double k1 = band(rng), k2 = band(rng);
  std::uniform_real_distribution<double> eig(-k1, k2);
  const auto V = random_orthogonal(n, rng);
  std::vector<double> lam(n);
  for (auto& l : lam) l = eig(rng);
  tr.R.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p) tr.R[i][j] += V[p][i] * lam[p] * V[p][j];
  tr.g.resize(n);
  for (auto& x : tr.g) x = uni(rng);
  tr.f = -3.0 * pos(rng);
  tr.alpha = 1.0 + 3.0 * pos(rng);
  const double split = pos(rng);
  tr.a = split / tr.alpha;
  tr.b = (1.0 - split) / tr.alpha;
  return tr;
}

// (i) The sum-of-squares rewrite behind the w-inequality. With s = 1-f,
// G2 = |g|^2, Q = g^T H g, and grad f . grad w expanded as 2Q/s^2+2G2^2/s^3,
// the raw expansion of (Lap - d/dt)w equals the completed-square form, and
// their common value exceeds the inequality's right-hand side by exactly
// 2 sum_ij (H_ij/s + g_i g_j/s^2)^2.
inline double w_identity_error(const AlgebraTrial& tr, double* ineq_gap) {
  const int n = tr.n;
  const double s = 1.0 - tr.f;
  double G2 = 0.0, Q = 0.0, H2 = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) G2 += tr.g[i] * tr.g[i];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Q += tr.g[i] * tr.H[i][j] * tr.g[j];
      H2 += tr.H[i][j] * tr.H[i][j];
      const double e = tr.H[i][j] / s + tr.g[i] * tr.g[j] / (s * s);
      sq += e * e;
    }
  const double G4 = G2 * G2;
  const double raw = 2.0 * H2 / (s * s) + 8.0 * Q / (s * s * s) - 4.0 * Q / (s * s) +
                     6.0 * G4 / (s * s * s * s) - 2.0 * G4 / (s * s * s);
  const double gradfw = 2.0 * Q / (s * s) + 2.0 * G4 / (s * s * s);
  const double completed =
      2.0 * sq + 2.0 * gradfw / s + 2.0 * G4 / (s * s * s) - 2.0 * gradfw;
  const double w = G2 / (s * s);
  const double rhs = (2.0 * tr.f / s) * gradfw + 2.0 * s * w * w;
  *ineq_gap = raw - rhs - 2.0 * sq;  // should vanish identically
  return raw - completed;
}

// (ii) The completed square behind the F-inequality:
// sum (H_ij^2 + alpha R_ij H_ij) = a alpha sum H_ij^2
//   + sum alpha (sqrt(b) H_ij + R_ij/(2 sqrt(b)))^2 - (alpha/4b) sum R_ij^2.
inline double square_completion_error(const AlgebraTrial& tr, double* ineq_gap) {
  const int n = tr.n;
  double lhs = 0.0, h2 = 0.0, r2 = 0.0, sq = 0.0;
  const double sb = std::sqrt(tr.b);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      lhs += tr.H[i][j] * tr.H[i][j] + tr.alpha * tr.R[i][j] * tr.H[i][j];
      h2 += tr.H[i][j] * tr.H[i][j];
      r2 += tr.R[i][j] * tr.R[i][j];
      const double e = sb * tr.H[i][j] + tr.R[i][j] / (2.0 * sb);
      sq += tr.alpha * e * e;
    }
  const double rhs = tr.a * tr.alpha * h2 + sq - tr.alpha / (4.0 * tr.b) * r2;
  *ineq_gap = lhs - (tr.a * tr.alpha * h2 - tr.alpha / (4.0 * tr.b) * r2);  // >= 0
  return lhs - rhs;
}

}  // namespace detail

/// Brute-force verification of the two pointwise algebraic identities used
/// by the evolution-inequality proofs, on random symmetric data. Also pins
/// the hand-checked 1x1 instance 3 = 0.5 + 4.5 - 2.
inline EstimateReport random_square_completion_checks(std::uint64_t seed, int trials,
                                                     std::span<const int> dims) {
  EstimateReport rep;
  rep.theorem = "square_completion";
  std::mt19937_64 rng(seed);

  {  // pinned 1x1 case: H = [1], R = [1], alpha = 2, a = b = 1/4
    detail::AlgebraTrial tr;
    tr.n = 1;
    tr.H = {{1.0}};
    tr.R = {{1.0}};
    tr.g = {0.0};
    tr.f = -1.0;
    tr.alpha = 2.0;
    tr.a = tr.b = 0.25;
    double gap = 0.0;
    const double err = detail::square_completion_error(tr, &gap);
    rep.extras["hand_case_error"] = err;
    rep.extras["hand_case_gap"] = gap;  // 3 - (0.5 - 2) = 4.5
  }

  double max_err = 0.0, min_gap = 1e300;
  for (int n : dims) {
    for (int trial = 0; trial < trials; ++trial) {
      const auto tr = detail::random_trial(n, rng);
      double gap1 = 0.0, gap2 = 0.0;
      const double e1 = std::abs(detail::w_identity_error(tr, &gap1));
      const double e2 = std::abs(detail::square_completion_error(tr, &gap2));
      const double scale = std::max(1.0, static_cast<double>(n * n));
      max_err = std::max(max_err, std::max(e1, std::abs(gap1)) / scale);
      max_err = std::max(max_err, e2 / scale);
      min_gap = std::min(min_gap, gap2);
      if (trial == 0)
        rep.fold(0.0, n, std::max(e1, e2), 1e-12, true);
    }
  }
  rep.extras["max_relative_error"] = max_err;
  rep.extras["min_inequality_gap"] = min_gap;
  rep.fold(0.0, 0.0, max_err, 1e-12, true);
  rep.tolerance = 0.0;
  rep.finish();
  rep.pass = (max_err <= 1e-12) && (min_gap >= -1e-12) &&
             std::abs(rep.extras["hand_case_error"]) <= 1e-12 &&
             std::abs(rep.extras["hand_case_gap"] - 4.5) <= 1e-12;
  return rep;
}

}  // namespace rfheat
