#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "rfheat/geometry.hpp"

namespace rfheat {

enum class FlowKind { homothetic, conformal, static_metric };

/// Time-indexed discretized metric data with curvature accessors. Homothetic
/// trajectories evaluate c(t) in closed form; the conformal trajectory stores
/// dense uniform samples and interpolates linearly in t.
struct MetricTrajectory {
  ManifoldModel model;
  FlowKind kind = FlowKind::homothetic;
  double T = 0.0;
  std::vector<double> times;
  std::vector<MetricState> states;
  double existence_horizon = std::numeric_limits<double>::infinity();

  bool homothetic_like() const { return kind != FlowKind::conformal; }

  /// Closed-form homothetic scale; exact, no interpolation error.
  double scale_at(double t) const {
    if (kind == FlowKind::static_metric) return model.radius * model.radius;
    if (model.kind == ModelKind::flat_torus) return 1.0;
    const double c = model.radius * model.radius - 2.0 * (model.dim - 1) * t;
    if (c <= 0.0) throw ExistenceTimeError("metric degenerate: c(t) <= 0 at t=" + std::to_string(t));
    return c;
  }

  void conf_at(double t, std::vector<double>& out) const {
    const int k = bracket(t);
    const double w = (t - times[k]) / (times[k + 1] - times[k]);
    const auto& a = states[k].conf;
    const auto& b = states[k + 1].conf;
    out.resize(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
  }

  MetricState at(double t) const {
    MetricState st;
    st.t = t;
    if (homothetic_like()) {
      st.scale = scale_at(t);
      if (model.kind == ModelKind::flat_torus) {
        st.k1_neg = st.k2_pos = 0.0;
      } else {
        st.k2_pos = (model.dim - 1) / st.scale;
        st.k1_neg = 0.0;
      }
      return st;
    }
    const int k = bracket(t);
    const double w = (t - times[k]) / (times[k + 1] - times[k]);
    const auto& a = states[k];
    const auto& b = states[k + 1];
    st.conf.resize(a.conf.size());
    st.curvature.resize(a.curvature.size());
    for (size_t i = 0; i < a.conf.size(); ++i) {
      st.conf[i] = (1.0 - w) * a.conf[i] + w * b.conf[i];
      st.curvature[i] = (1.0 - w) * a.curvature[i] + w * b.curvature[i];
    }
    st.k1_neg = std::max(a.k1_neg, b.k1_neg);
    st.k2_pos = std::max(a.k2_pos, b.k2_pos);
    return st;
  }

  double min_scale_at(double t) const {
    if (homothetic_like()) return scale_at(t);
    MetricState st = at(t);
    return st.min_s();
  }

 private:
  int bracket(double t) const {
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
      throw ExistenceTimeError("time outside trajectory horizon");
    const double dt = times[1] - times[0];
    int k = static_cast<int>((t - times.front()) / dt);
    k = std::clamp(k, 0, static_cast<int>(times.size()) - 2);
    return k;
  }
};

/// Second-fundamental-form data on the cap boundary: II = lambda(t) g.
struct BoundaryData {
  std::vector<double> times;
  std::vector<double> lambda;
  double lambda_scaled = 0.0;  // lambda(t)*sqrt(c(t)), constant by construction
};

/// Closed-form homothetic Ricci flow: c(t) = r0^2 - 2(n-1)t on spheres and
/// caps, c == 1 on the flat torus (Ricci-flat fixed point).
inline MetricTrajectory evolve_homothetic(const ManifoldModel& model, double T, int store_steps) {
  model.validate();
  if (model.kind == ModelKind::axisym_conformal_sphere)
    throw std::invalid_argument("evolve_homothetic: use evolve_axisym_conformal");
  if (store_steps < 2) throw std::invalid_argument("evolve_homothetic: need >= 2 stored steps");
  MetricTrajectory traj;
  traj.model = model;
  traj.kind = FlowKind::homothetic;
  traj.T = T;
  if (model.kind != ModelKind::flat_torus && model.dim >= 2) {
    traj.existence_horizon = model.radius * model.radius / (2.0 * (model.dim - 1));
    if (T >= traj.existence_horizon)
      throw ExistenceTimeError("evolve_homothetic: T >= existence horizon r0^2/(2(n-1))");
  }
  traj.times.resize(store_steps + 1);
  traj.states.resize(store_steps + 1);
  for (int m = 0; m <= store_steps; ++m) {
    const double t = T * m / store_steps;
    traj.times[m] = t;
    traj.states[m] = traj.at(t);
  }
  return traj;
}

/// Frozen metric (no flow); honest only on Ricci-flat models but useful as a
/// stationary-limit reference elsewhere.
inline MetricTrajectory freeze_metric(const ManifoldModel& model, double T, int store_steps) {
  model.validate();
  MetricTrajectory traj;
  traj.model = model;
  traj.kind = FlowKind::static_metric;
  traj.T = T;
  traj.times.resize(store_steps + 1);
  traj.states.resize(store_steps + 1);
  for (int m = 0; m <= store_steps; ++m) {
    const double t = T * m / store_steps;
    traj.times[m] = t;
    traj.states[m] = traj.at(t);
  }
  return traj;
}

namespace detail {

inline std::vector<double> gauss_curvature(const ManifoldModel& m, std::span<const double> v) {
  std::vector<double> lap = laplace_reference(m, v);
  std::vector<double> k(v.size());
  for (size_t i = 0; i < v.size(); ++i) k[i] = std::exp(-2.0 * v[i]) * (1.0 - lap[i]);
  return k;
}

inline MetricState conformal_state(const ManifoldModel& m, double t, std::span<const double> v) {
  MetricState st;
  st.t = t;
  st.conf.resize(v.size());
  for (size_t i = 0; i < v.size(); ++i) st.conf[i] = std::exp(2.0 * v[i]);
  st.curvature = gauss_curvature(m, v);
  double kmin = st.curvature[0], kmax = st.curvature[0];
  for (double k : st.curvature) {
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
  }
  st.k2_pos = std::max(kmax, 0.0);
  st.k1_neg = std::max(-kmin, 0.0);
  return st;
}

}  // namespace detail

/// Axisymmetric conformal Ricci flow on S^2: g = e^{2v} g_{S^2} with
/// dv/dt = e^{-2v}(Lap_{S^2} v - 1), integrated by CFL-limited RK4.
inline MetricTrajectory evolve_axisym_conformal(const ManifoldModel& model,
                                                std::span<const double> v0, double T,
                                                int store_steps) {
  model.validate();
  if (model.kind != ModelKind::axisym_conformal_sphere)
    throw std::invalid_argument("evolve_axisym_conformal: model kind mismatch");
  detail::check_field(model, v0);
  for (double v : v0)
    if (std::abs(v) > 0.5)
      throw std::invalid_argument("evolve_axisym_conformal: require |v0| <= 0.5");

  const int np = model.npoints();
  const double h = model.spacing();
  MetricTrajectory traj;
  traj.model = model;
  traj.kind = FlowKind::conformal;
  traj.T = T;
  traj.times.resize(store_steps + 1);
  traj.states.resize(store_steps + 1);

  std::vector<double> v(v0.begin(), v0.end());
  auto rhs = [&](const std::vector<double>& w, std::vector<double>& out) {
    std::vector<double> lap = laplace_reference(model, w);
    out.resize(np);
    for (int i = 0; i < np; ++i) out[i] = std::exp(-2.0 * w[i]) * (lap[i] - 1.0);
  };
  std::vector<double> k1, k2, k3, k4, tmp(np);

  traj.times[0] = 0.0;
  traj.states[0] = detail::conformal_state(model, 0.0, v);
  const double dt_store = T / store_steps;
  for (int m = 1; m <= store_steps; ++m) {
    double t = traj.times[m - 1];
    const double t_end = T * m / store_steps;
    while (t < t_end - 1e-15) {
      double emin = 1e300;
      double vmax = 0.0;
      for (int i = 0; i < np; ++i) {
        emin = std::min(emin, std::exp(2.0 * v[i]));
        vmax = std::max(vmax, std::abs(v[i]));
      }
      if (vmax > 5.0) throw PositivityError("conformal flow blow-up: |v| > 5");
      double dt = 0.25 * emin * h * h;
      if (dt < 1e-14) throw CflError("conformal flow: CFL step underflow (metric collapse)");
      dt = std::min(dt, t_end - t);
      rhs(v, k1);
      for (int i = 0; i < np; ++i) tmp[i] = v[i] + 0.5 * dt * k1[i];
      rhs(tmp, k2);
      for (int i = 0; i < np; ++i) tmp[i] = v[i] + 0.5 * dt * k2[i];
      rhs(tmp, k3);
      for (int i = 0; i < np; ++i) tmp[i] = v[i] + dt * k3[i];
      rhs(tmp, k4);
      for (int i = 0; i < np; ++i)
        v[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      t += dt;
    }
    traj.times[m] = t_end;
    traj.states[m] = detail::conformal_state(model, t_end, v);
  }
  (void)dt_store;
  return traj;
}

/// Umbilic factor of the cap boundary under the homothetic flow:
/// lambda(t) = cot(theta0)/sqrt(c(t)); lambda*sqrt(c) is exactly constant.
inline BoundaryData boundary_lambda(const MetricTrajectory& traj) {
  if (traj.model.kind != ModelKind::spherical_cap)
    throw std::invalid_argument("boundary_lambda: trajectory is not a cap");
  if (traj.model.theta0 > kPi / 2.0 + 1e-12)
    throw HypothesisViolation("boundary_lambda: theta0 > pi/2 makes lambda negative");
  BoundaryData bd;
  bd.times = traj.times;
  bd.lambda.resize(traj.times.size());
  bd.lambda_scaled = 1.0 / std::tan(traj.model.theta0);
  for (size_t m = 0; m < traj.times.size(); ++m)
    bd.lambda[m] = bd.lambda_scaled / std::sqrt(traj.scale_at(traj.times[m]));
  return bd;
}

/// Distance between two meridian/circle coordinates in the time-t metric.
inline double distance(const MetricTrajectory& traj, double a, double b, double t) {
  const ManifoldModel& m = traj.model;
  if (m.kind == ModelKind::flat_torus) {
    double d = std::abs(a - b);
    d = std::fmod(d, m.period);
    return std::min(d, m.period - d);
  }
  if (traj.homothetic_like()) return std::abs(a - b) * std::sqrt(traj.scale_at(t));
  // conformal: quadrature of the line element e^{v} d(theta) over grid cells
  MetricState st = traj.at(t);
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double h = m.spacing();
  double acc = 0.0;
  const auto ev = [&](double th) {
    int i = std::clamp(static_cast<int>(th / h), 0, m.npoints() - 2);
    const double w = th / h - i;
    const double c = (1.0 - w) * st.conf[i] + w * st.conf[i + 1];
    return std::sqrt(c);
  };
  const int nseg = 64;
  const double dth = (hi - lo) / nseg;
  for (int j = 0; j < nseg; ++j)
    acc += 0.5 * (ev(lo + j * dth) + ev(lo + (j + 1) * dth)) * dth;
  return acc;
}

/// Tightest grid-measured Ricci bounds -k1 g <= Ric <= k2 g over an interval.
inline std::pair<double, double> ricci_range(const MetricTrajectory& traj, double t0, double t1) {
  if (t1 < t0) std::swap(t0, t1);
  if (t1 > traj.T + 1e-12) throw ExistenceTimeError("ricci_range: interval beyond trajectory");
  double k1 = 0.0, k2 = 0.0;
  const auto fold = [&](const MetricState& st) {
    k1 = std::max(k1, st.k1_neg);
    k2 = std::max(k2, st.k2_pos);
  };
  fold(traj.at(t0));
  fold(traj.at(t1));
  for (size_t m = 0; m < traj.times.size(); ++m)
    if (traj.times[m] >= t0 - 1e-12 && traj.times[m] <= t1 + 1e-12) fold(traj.states[m]);
  return {k1, k2};
}

/// Pointwise metric factor at an arbitrary coordinate (linear interpolation on
/// the grid for conformal states).
inline double metric_factor(const MetricTrajectory& traj, double coord, double t) {
  if (traj.homothetic_like()) return traj.scale_at(t);
  MetricState st = traj.at(t);
  const double h = traj.model.spacing();
  int i = std::clamp(static_cast<int>(coord / h), 0, traj.model.npoints() - 2);
  const double w = coord / h - i;
  return (1.0 - w) * st.conf[i] + w * st.conf[i + 1];
}

}  // namespace rfheat
