#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rfheat/geometry.hpp"
#include "rfheat/ricci_flow.hpp"

using namespace rfheat;

namespace {

ManifoldModel sphere(int n = 256) {
  ManifoldModel m;
  m.kind = ModelKind::round_sphere;
  m.grid_n = n;
  return m;
}

ManifoldModel torus(int n = 256) {
  ManifoldModel m;
  m.kind = ModelKind::flat_torus;
  m.dim = 1;
  m.grid_n = n;
  return m;
}

std::vector<double> sampled(const ManifoldModel& m, double (*fn)(double)) {
  std::vector<double> u(m.npoints());
  const double h = m.spacing();
  for (int i = 0; i < m.npoints(); ++i) u[i] = fn(i * h);
  return u;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST_CASE("constant fields have zero gradient and Laplacian") {
  const auto m = sphere();
  MetricState st;
  std::vector<double> u(m.npoints(), 7.5);
  for (double v : laplace_beltrami(m, st, u)) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
  for (double v : grad_norm_sq(m, st, u)) CHECK(v == 0.0);
}

TEST_CASE("sphere: cos(theta) reproduces the l=1 harmonic identities") {
  const auto m = sphere();
  MetricState st;  // unit metric
  const auto u = sampled(m, [](double th) { return std::cos(th); });
  const auto lap = laplace_beltrami(m, st, u);
  const auto g2 = grad_norm_sq(m, st, u);
  const double h = m.spacing();
  double err_lap = 0.0, err_g = 0.0;
  for (int i = 0; i < m.npoints(); ++i) {
    const double th = i * h;
    err_lap = std::max(err_lap, std::abs(lap[i] + 2.0 * std::cos(th)));
    err_g = std::max(err_g, std::abs(g2[i] - std::sin(th) * std::sin(th)));
  }
  CHECK(err_lap < 5e-4);
  CHECK(err_g < 5e-4);
}

TEST_CASE("scaled metric: |grad cos|^2 = 2 at the equator when c = 0.5") {
  const auto m = sphere();
  MetricState st;
  st.scale = 0.5;
  const auto u = sampled(m, [](double th) { return std::cos(th); });
  const auto g2 = grad_norm_sq(m, st, u);
  CHECK(g2[m.npoints() / 2] == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("homothetic scaling is an exact identity of the code path") {
  const auto m = sphere(64);
  const auto u = sampled(m, [](double th) { return 2.0 + std::cos(3.0 * th); });
  MetricState unit;
  MetricState scaled;
  scaled.scale = 0.37;
  const auto lap0 = laplace_beltrami(m, unit, u);
  const auto lapc = laplace_beltrami(m, scaled, u);
  for (int i = 0; i < m.npoints(); ++i)
    CHECK(lapc[i] == doctest::Approx(lap0[i] / 0.37).epsilon(1e-15));
}

TEST_CASE("discrete spectrum: lowest Legendre modes at second order") {
  // Lap P_l(cos theta) = -l(l+1) P_l(cos theta); error must shrink ~4x per
  // grid doubling.
  for (int l = 1; l <= 3; ++l) {
    double prev = 0.0;
    for (int refine = 0; refine < 2; ++refine) {
      const auto m = sphere(refine ? 256 : 128);
      MetricState st;
      std::vector<double> u(m.npoints());
      const double h = m.spacing();
      for (int i = 0; i < m.npoints(); ++i) {
        const double x = std::cos(i * h);
        u[i] = (l == 1) ? x : (l == 2) ? 0.5 * (3 * x * x - 1) : 0.5 * (5 * x * x * x - 3 * x);
      }
      const auto lap = laplace_beltrami(m, st, u);
      double err = 0.0;
      for (int i = 0; i < m.npoints(); ++i)
        err = std::max(err, std::abs(lap[i] + l * (l + 1.0) * u[i]));
      if (refine) {
        CHECK(prev / err > 3.5);
      } else {
        prev = err;
      }
    }
  }
}

TEST_CASE("torus Laplacian is the periodic central stencil") {
  const auto m = torus();
  MetricState st;
  const auto u = sampled(m, [](double x) { return std::cos(x); });
  const auto lap = laplace_beltrami(m, st, u);
  std::vector<double> expect(u.size());
  for (size_t i = 0; i < u.size(); ++i) expect[i] = -u[i];
  CHECK(max_abs_diff(lap, expect) < 1e-4);
}

TEST_CASE("distance closed forms") {
  auto traj = evolve_homothetic(sphere(), 0.2, 50);
  CHECK(distance(traj, 0.0, kPi, 0.18) == doctest::Approx(0.8 * kPi).epsilon(1e-12));
  CHECK(distance(traj, 0.7, 0.7, 0.1) == 0.0);

  auto flat = evolve_homothetic(torus(), 1.0, 50);
  CHECK(distance(flat, kPi, 0.0, 0.5) == doctest::Approx(kPi).epsilon(1e-12));
  // wrap-around: the short way round
  CHECK(distance(flat, 0.1, 2.0 * kPi - 0.1, 0.5) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("distance scales exactly by sqrt(c) on homothetic models") {
  auto traj = evolve_homothetic(sphere(), 0.2, 50);
  const double d0 = distance(traj, 0.0, 1.0, 0.0);
  const double d = distance(traj, 0.0, 1.0, 0.2);
  CHECK(d / d0 == doctest::Approx(std::sqrt(traj.scale_at(0.2))).epsilon(1e-14));
}

TEST_CASE("flux operator conserves the discrete integral") {
  for (const auto& m : {sphere(200), torus(200)}) {
    FluxOperator flux(m);
    std::vector<double> u(m.npoints());
    const double h = m.spacing();
    for (int i = 0; i < m.npoints(); ++i) u[i] = 1.0 + 0.5 * std::sin(3.0 * i * h + 0.3);
    std::vector<double> lu(m.npoints());
    flux.apply(u, lu);
    const auto vol = flux.cell_volumes();
    double total = 0.0, scale = 0.0;
    for (int i = 0; i < m.npoints(); ++i) {
      total += vol[i] * lu[i];
      scale += vol[i] * std::abs(lu[i]);
    }
    CHECK(std::abs(total) < 1e-13 * std::max(scale, 1.0));
  }
}

TEST_CASE("cap boundary: normal derivative via one-sided differences") {
  ManifoldModel cap;
  cap.kind = ModelKind::spherical_cap;
  cap.boundary = true;
  cap.theta0 = kPi / 2.0;
  cap.grid_n = 256;
  MetricState st;
  st.scale = 0.25;
  const auto u = sampled(cap, [](double th) { return std::cos(th); });
  // d/dtheta cos = -1 at the equator; g-normal derivative divides by sqrt(c)
  CHECK(boundary_normal_derivative(cap, st, u) == doctest::Approx(-2.0).epsilon(1e-4));

  const auto v = sampled(cap, [](double th) { return std::cos(2.0 * th); });
  CHECK(boundary_normal_derivative(cap, st, v) == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("model validation rejects inconsistent descriptors") {
  ManifoldModel m = sphere();
  m.grid_n = 8;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = sphere();
  m.boundary = true;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  ManifoldModel cap;
  cap.kind = ModelKind::spherical_cap;
  cap.boundary = true;
  cap.theta0 = 2.0;  // > pi/2
  CHECK_THROWS_AS(cap.validate(), std::invalid_argument);
}

TEST_CASE("field length mismatch is rejected") {
  const auto m = sphere();
  MetricState st;
  std::vector<double> bad(10, 1.0);
  CHECK_THROWS_AS(laplace_beltrami(m, st, bad), std::invalid_argument);
}
