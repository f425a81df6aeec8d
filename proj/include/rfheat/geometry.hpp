#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rfheat/errors.hpp"

namespace rfheat {

inline constexpr double kPi = std::numbers::pi;

enum class ModelKind { round_sphere, flat_torus, axisym_conformal_sphere, spherical_cap };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::round_sphere: return "round_sphere";
    case ModelKind::flat_torus: return "flat_torus";
    case ModelKind::axisym_conformal_sphere: return "axisym_conformal_sphere";
    case ModelKind::spherical_cap: return "spherical_cap";
  }
  return "?";
}

/// Symbolic descriptor of a model geometry family. All models reduce to a 1D
/// grid: colatitude on spheres and caps, the circle coordinate on tori.
struct ManifoldModel {
  ModelKind kind = ModelKind::round_sphere;
  int dim = 2;
  bool boundary = false;
  double radius = 1.0;        // initial radius r0
  double theta0 = kPi / 2.0;  // cap colatitude
  double period = 2.0 * kPi;  // torus period length
  int grid_n = 256;           // grid segments

  void validate() const {
    if (dim < 1) throw std::invalid_argument("model: dim must be >= 1");
    if (grid_n < 16) throw std::invalid_argument("model: grid resolution must be >= 16");
    if (radius <= 0.0) throw std::invalid_argument("model: radius must be positive");
    if (boundary != (kind == ModelKind::spherical_cap))
      throw std::invalid_argument("model: boundary flag must match spherical_cap kind");
    if (kind == ModelKind::spherical_cap && (theta0 <= 0.0 || theta0 > kPi / 2.0 + 1e-12))
      throw std::invalid_argument("model: cap colatitude must lie in (0, pi/2]");
    if (kind == ModelKind::flat_torus && period <= 0.0)
      throw std::invalid_argument("model: torus period must be positive");
    if (kind == ModelKind::axisym_conformal_sphere && dim != 2)
      throw std::invalid_argument("model: conformal model is a surface (dim 2)");
    if (kind == ModelKind::round_sphere && dim < 2)
      throw std::invalid_argument("model: round_sphere requires dim >= 2");
  }

  bool periodic() const { return kind == ModelKind::flat_torus; }
  bool has_cap_boundary() const { return kind == ModelKind::spherical_cap; }

  double domain_length() const {
    switch (kind) {
      case ModelKind::flat_torus: return period;
      case ModelKind::spherical_cap: return theta0;
      default: return kPi;
    }
  }

  int npoints() const { return periodic() ? grid_n : grid_n + 1; }
  double spacing() const { return domain_length() / grid_n; }

  std::vector<double> grid_coords() const {
    std::vector<double> x(npoints());
    const double h = spacing();
    for (int i = 0; i < npoints(); ++i) x[i] = i * h;
    return x;
  }
};

/// Snapshot of the metric at one time. Homothetic states carry the scalar
/// factor c(t) on the unit reference metric; conformal states carry e^{2v}
/// samples. Ricci eigen-bounds satisfy -k1_neg g <= Ric <= k2_pos g.
struct MetricState {
  double t = 0.0;
  double scale = 1.0;
  std::vector<double> conf;       // e^{2v} per grid point; empty => homothetic
  std::vector<double> curvature;  // Gauss curvature samples (conformal only)
  double k1_neg = 0.0;
  double k2_pos = 0.0;

  bool homothetic() const { return conf.empty(); }
  double s(int i) const { return homothetic() ? scale : conf[static_cast<size_t>(i)]; }
  double min_s() const {
    if (homothetic()) return scale;
    return *std::min_element(conf.begin(), conf.end());
  }
};

/// Pole-centered parabolic ball B_{rho,T}: membership uses the time-t metric.
struct Ball {
  double rho = 1.0;
  double horizon = 0.0;  // T
};

namespace detail {

inline void check_field(const ManifoldModel& m, std::span<const double> u) {
  if (static_cast<int>(u.size()) != m.npoints())
    throw std::invalid_argument("field length does not match model grid");
}

inline double omega(const ManifoldModel& m, double theta) {
  if (m.kind == ModelKind::flat_torus) return 1.0;
  return std::pow(std::sin(theta), m.dim - 1);
}

// Composite Simpson over one grid cell; plenty for volume weights.
inline double omega_cell_integral(const ManifoldModel& m, double a, double b) {
  const int k = 8;
  const double h = (b - a) / k;
  double s = omega(m, a) + omega(m, b);
  for (int j = 1; j < k; ++j) s += (j % 2 ? 4.0 : 2.0) * omega(m, a + j * h);
  return s * h / 3.0;
}

}  // namespace detail

/// Reference Laplace-Beltrami operator of the unit base metric applied to an
/// axisymmetric field: interior points use second-order central differences,
/// the poles use the regularity limit n*u_{theta theta}, and the cap boundary
/// uses one-sided second-order stencils (valid for fields that need not
/// satisfy the Neumann condition there).
inline std::vector<double> laplace_reference(const ManifoldModel& m, std::span<const double> u) {
  detail::check_field(m, u);
  const int np = m.npoints();
  const double h = m.spacing();
  const double h2 = h * h;
  std::vector<double> out(np);
  if (m.kind == ModelKind::flat_torus) {
    for (int i = 0; i < np; ++i) {
      const int ip = (i + 1) % np;
      const int im = (i + np - 1) % np;
      out[i] = (u[ip] - 2.0 * u[i] + u[im]) / h2;
    }
    return out;
  }
  const int n = m.dim;
  for (int i = 1; i < np - 1; ++i) {
    const double th = i * h;
    const double upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    const double up = (u[i + 1] - u[i - 1]) / (2.0 * h);
    out[i] = upp + (n - 1) * (std::cos(th) / std::sin(th)) * up;
  }
  out[0] = n * 2.0 * (u[1] - u[0]) / h2;
  if (m.has_cap_boundary()) {
    const int N = np - 1;
    const double th = m.theta0;
    const double upp = (2.0 * u[N] - 5.0 * u[N - 1] + 4.0 * u[N - 2] - u[N - 3]) / h2;
    const double up = (3.0 * u[N] - 4.0 * u[N - 1] + u[N - 2]) / (2.0 * h);
    out[N] = upp + (n - 1) * (std::cos(th) / std::sin(th)) * up;
  } else {
    const int N = np - 1;
    out[N] = n * 2.0 * (u[N - 1] - u[N]) / h2;
  }
  return out;
}

/// Central coordinate derivative of an axisymmetric field; zero at poles by
/// regularity, one-sided second order at the cap boundary.
inline std::vector<double> coord_derivative(const ManifoldModel& m, std::span<const double> u) {
  detail::check_field(m, u);
  const int np = m.npoints();
  const double h = m.spacing();
  std::vector<double> out(np);
  if (m.kind == ModelKind::flat_torus) {
    for (int i = 0; i < np; ++i) {
      const int ip = (i + 1) % np;
      const int im = (i + np - 1) % np;
      out[i] = (u[ip] - u[im]) / (2.0 * h);
    }
    return out;
  }
  for (int i = 1; i < np - 1; ++i) out[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  out[0] = 0.0;
  const int N = np - 1;
  if (m.has_cap_boundary()) {
    out[N] = (3.0 * u[N] - 4.0 * u[N - 1] + u[N - 2]) / (2.0 * h);
  } else {
    out[N] = 0.0;
  }
  return out;
}

inline std::vector<double> laplace_beltrami(const ManifoldModel& m, const MetricState& st,
                                            std::span<const double> u) {
  std::vector<double> out = laplace_reference(m, u);
  for (int i = 0; i < m.npoints(); ++i) out[i] /= st.s(i);
  return out;
}

inline std::vector<double> grad_norm_sq(const ManifoldModel& m, const MetricState& st,
                                        std::span<const double> u) {
  std::vector<double> d = coord_derivative(m, u);
  for (int i = 0; i < m.npoints(); ++i) d[i] = d[i] * d[i] / st.s(i);
  return d;
}

/// g(t)-inner product of the gradients of two axisymmetric fields.
inline std::vector<double> grad_inner(const ManifoldModel& m, const MetricState& st,
                                      std::span<const double> a, std::span<const double> b) {
  std::vector<double> da = coord_derivative(m, a);
  const std::vector<double> db = coord_derivative(m, b);
  for (int i = 0; i < m.npoints(); ++i) da[i] = da[i] * db[i] / st.s(i);
  return da;
}

/// One-sided outward normal derivative at the cap boundary in the g(t) metric.
inline double boundary_normal_derivative(const ManifoldModel& m, const MetricState& st,
                                         std::span<const double> u) {
  detail::check_field(m, u);
  if (!m.has_cap_boundary())
    throw std::invalid_argument("boundary_normal_derivative: model has no boundary");
  const int N = m.npoints() - 1;
  const double h = m.spacing();
  const double du = (3.0 * u[N] - 4.0 * u[N - 1] + u[N - 2]) / (2.0 * h);
  return du / std::sqrt(st.s(N));
}

/// Conservative (flux-form) reference Laplacian used by the time steppers:
/// telescoping fluxes make the discrete integral over the base volume form an
/// exact invariant on closed models and under zero-flux boundaries.
class FluxOperator {
 public:
  explicit FluxOperator(const ManifoldModel& m) : model_(m) {
    const int np = m.npoints();
    const double h = m.spacing();
    if (m.periodic()) return;  // torus handled directly in apply()
    face_.resize(np - 1);
    inv_vol_.resize(np);
    for (int j = 0; j + 1 < np; ++j) face_[j] = detail::omega(m, (j + 0.5) * h);
    const double L = m.domain_length();
    for (int i = 0; i < np; ++i) {
      const double a = std::max(0.0, (i - 0.5) * h);
      const double b = std::min(L, (i + 0.5) * h);
      inv_vol_[i] = 1.0 / detail::omega_cell_integral(m, a, b);
    }
  }

  void apply(std::span<const double> u, std::span<double> out) const {
    const int np = model_.npoints();
    const double h = model_.spacing();
    if (model_.periodic()) {
      const double inv_h2 = 1.0 / (h * h);
      for (int i = 0; i < np; ++i) {
        const int ip = (i + 1) % np;
        const int im = (i + np - 1) % np;
        out[i] = (u[ip] - 2.0 * u[i] + u[im]) * inv_h2;
      }
      return;
    }
    for (int i = 0; i < np; ++i) {
      const double fp = (i + 1 < np) ? face_[i] * (u[i + 1] - u[i]) / h : 0.0;
      const double fm = (i > 0) ? face_[i - 1] * (u[i] - u[i - 1]) / h : 0.0;
      out[i] = (fp - fm) * inv_vol_[i];
    }
  }

  /// Cell volume weights of the base metric (trapezoid-like, exact partner of
  /// the flux form: sum_i vol_i * apply(u)_i telescopes to boundary fluxes).
  std::vector<double> cell_volumes() const {
    const int np = model_.npoints();
    if (model_.periodic()) return std::vector<double>(np, model_.spacing());
    std::vector<double> v(np);
    for (int i = 0; i < np; ++i) v[i] = 1.0 / inv_vol_[i];
    return v;
  }

 private:
  ManifoldModel model_;
  std::vector<double> face_;
  std::vector<double> inv_vol_;
};

}  // namespace rfheat
