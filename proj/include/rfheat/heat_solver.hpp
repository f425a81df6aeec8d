#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "rfheat/ricci_flow.hpp"

namespace rfheat {

/// Positive solution u(x,t) of (Lap - d/dt)u = 0 on an evolving metric,
/// sampled on the model grid at dense uniform times.
struct HeatSolution {
  std::shared_ptr<const MetricTrajectory> traj;
  std::vector<double> times;
  std::vector<std::vector<double>> fields;
  double initial_sup = 0.0;  // A = sup_M u(.,0)
  double dt_solver = 0.0;    // largest internal step; 0 for exact solutions
  double time_shift = 0.0;   // epsilon shift for solutions living on (0,T]
  bool neumann_incompatible = false;

  const ManifoldModel& model() const { return traj->model; }
  int npoints() const { return traj->model.npoints(); }
  int nsteps() const { return static_cast<int>(times.size()); }
  double dt_store() const { return times[1] - times[0]; }

  const std::vector<double>& at(int m) const { return fields[static_cast<size_t>(m)]; }

  int nearest_time_index(double t) const {
    const double dt = dt_store();
    int m = static_cast<int>(std::lround((t - times.front()) / dt));
    return std::clamp(m, 0, nsteps() - 1);
  }
};

inline double sup_initial(const HeatSolution& sol) { return sol.initial_sup; }

/// u_t evaluated through the PDE as Lap_{g(t)} u, avoiding one time
/// discretization error source.
inline std::vector<double> time_derivative_pde(const HeatSolution& sol, int m) {
  return laplace_beltrami(sol.model(), sol.traj->at(sol.times[static_cast<size_t>(m)]),
                          sol.at(m));
}

/// Independent cross-check: centered differences on the stored time grid.
inline std::vector<double> time_derivative_fd(const HeatSolution& sol, int m) {
  const int M = sol.nsteps();
  if (m <= 0 || m >= M - 1)
    throw std::invalid_argument("time_derivative_fd: need an interior time index");
  const auto& a = sol.at(m - 1);
  const auto& b = sol.at(m + 1);
  const double inv = 1.0 / (2.0 * sol.dt_store());
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (b[i] - a[i]) * inv;
  return out;
}

namespace detail {

inline std::vector<double> legendre_values(int lmax, double x) {
  std::vector<double> p(static_cast<size_t>(lmax) + 1);
  p[0] = 1.0;
  if (lmax >= 1) p[1] = x;
  for (int l = 2; l <= lmax; ++l)
    p[l] = ((2.0 * l - 1.0) * x * p[l - 1] - (l - 1.0) * p[l - 2]) / l;
  return p;
}

inline void check_positive(const std::vector<double>& u, const char* where) {
  for (double v : u)
    if (!(v > 0.0)) throw PositivityError(std::string(where) + ": solution lost positivity");
}

}  // namespace detail

/// Exact axisymmetric heat solution on the unit shrinking round S^2:
/// u(theta,t) = sum_l a_l P_l(cos theta) (1-2t)^{l(l+1)/2}.
inline HeatSolution solve_spectral_sphere(std::shared_ptr<const MetricTrajectory> traj,
                                          std::span<const double> modal, double T,
                                          int store_steps, double shift = 0.0) {
  const ManifoldModel& m = traj->model;
  if (m.kind != ModelKind::round_sphere || m.dim != 2 || std::abs(m.radius - 1.0) > 1e-14 ||
      traj->kind != FlowKind::homothetic)
    throw std::invalid_argument("solve_spectral_sphere: requires unit homothetic S^2");
  if (shift + T > traj->T + 1e-12)
    throw ExistenceTimeError("solve_spectral_sphere: horizon shorter than requested interval");
  const int lmax = static_cast<int>(modal.size()) - 1;
  if (lmax < 0) throw std::invalid_argument("solve_spectral_sphere: no modes given");

  HeatSolution sol;
  sol.traj = std::move(traj);
  sol.time_shift = shift;
  sol.times.resize(store_steps + 1);
  sol.fields.resize(store_steps + 1);
  const int np = m.npoints();
  const double h = m.spacing();
  for (int s = 0; s <= store_steps; ++s) {
    const double t = shift + T * s / store_steps;
    sol.times[s] = t;
    std::vector<double> u(np, 0.0);
    for (int i = 0; i < np; ++i) {
      const auto p = detail::legendre_values(lmax, std::cos(i * h));
      double acc = 0.0;
      for (int l = 0; l <= lmax; ++l)
        acc += modal[l] * p[l] * std::pow(1.0 - 2.0 * t, 0.5 * l * (l + 1.0));
      u[i] = acc;
    }
    detail::check_positive(u, "solve_spectral_sphere");
    sol.fields[s] = std::move(u);
  }
  sol.initial_sup = *std::max_element(sol.fields[0].begin(), sol.fields[0].end());
  return sol;
}

/// Method-of-lines solve of (Lap_{g(t)} - d/dt)u = 0 with RK4 and the
/// diffusion CFL step dt <= 0.25 c_min h^2; conservative flux Laplacian.
inline HeatSolution solve_fd(std::shared_ptr<const MetricTrajectory> traj,
                             std::vector<double> u0, double T, int store_steps,
                             double shift = 0.0) {
  const ManifoldModel& m = traj->model;
  detail::check_field(m, u0);
  detail::check_positive(u0, "solve_fd initial data");
  if (shift + T > traj->T + 1e-12)
    throw ExistenceTimeError("solve_fd: horizon shorter than requested interval");

  HeatSolution sol;
  sol.traj = traj;
  sol.time_shift = shift;
  sol.times.resize(store_steps + 1);
  sol.fields.resize(store_steps + 1);
  sol.times[0] = shift;
  sol.fields[0] = u0;
  sol.initial_sup = *std::max_element(u0.begin(), u0.end());

  const int np = m.npoints();
  const double h = m.spacing();
  FluxOperator flux(m);
  std::vector<double> conf_buf, lap(np), k1(np), k2(np), k3(np), k4(np), tmp(np);
  const bool conformal = (traj->kind == FlowKind::conformal);

  auto rhs = [&](const std::vector<double>& u, double t, std::vector<double>& out) {
    flux.apply(u, lap);
    if (conformal) {
      traj->conf_at(t, conf_buf);
      for (int i = 0; i < np; ++i) out[i] = lap[i] / conf_buf[i];
    } else {
      const double c = traj->scale_at(t);
      for (int i = 0; i < np; ++i) out[i] = lap[i] / c;
    }
  };

  std::vector<double> u = std::move(u0);
  for (int s = 1; s <= store_steps; ++s) {
    double t = sol.times[s - 1];
    const double t_end = shift + T * s / store_steps;
    while (t < t_end - 1e-15) {
      const double c_end = traj->min_scale_at(std::min(t_end, traj->T));
      const double c_now = traj->min_scale_at(t);
      double dt = 0.25 * std::min(c_now, c_end) * h * h;
      if (dt < 1e-15) throw CflError("solve_fd: CFL step underflow (metric collapse)");
      dt = std::min(dt, t_end - t);
      sol.dt_solver = std::max(sol.dt_solver, dt);
      rhs(u, t, k1);
      for (int i = 0; i < np; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
      rhs(tmp, t + 0.5 * dt, k2);
      for (int i = 0; i < np; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
      rhs(tmp, t + 0.5 * dt, k3);
      for (int i = 0; i < np; ++i) tmp[i] = u[i] + dt * k3[i];
      rhs(tmp, t + dt, k4);
      for (int i = 0; i < np; ++i) u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      t += dt;
    }
    detail::check_positive(u, "solve_fd");
    sol.times[s] = t_end;
    sol.fields[s] = u;
  }
  return sol;
}

/// Neumann heat problem on the spherical cap; the zero-flux boundary of the
/// conservative stepper realizes u_theta(theta0,t) = 0 (for homothetic
/// metrics the g(t)-normal derivative vanishes iff the coordinate one does).
inline HeatSolution solve_neumann_cap(std::shared_ptr<const MetricTrajectory> traj,
                                      std::vector<double> u0, double T, int store_steps,
                                      double shift = 0.0) {
  const ManifoldModel& m = traj->model;
  if (m.kind != ModelKind::spherical_cap)
    throw std::invalid_argument("solve_neumann_cap: model is not a cap");
  detail::check_field(m, u0);
  const int N = m.npoints() - 1;
  const double h = m.spacing();
  const double du = (3.0 * u0[N] - 4.0 * u0[N - 1] + u0[N - 2]) / (2.0 * h);
  double scale = 0.0;
  for (double v : u0) scale = std::max(scale, std::abs(v));
  const bool incompatible = std::abs(du) > 1e-4 * std::max(scale, 1.0);
  HeatSolution sol = solve_fd(std::move(traj), std::move(u0), T, store_steps, shift);
  sol.neumann_incompatible = incompatible;
  return sol;
}

}  // namespace rfheat
