#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rfheat/cutoff.hpp"

using namespace rfheat;

TEST_CASE("smooth step endpoints and analytic derivatives") {
  CHECK(detail::SmoothStep(-0.2).s == 0.0);
  CHECK(detail::SmoothStep(0.0).s == 0.0);
  CHECK(detail::SmoothStep(1.0).s == 1.0);
  CHECK(detail::SmoothStep(3.0).s == 1.0);
  CHECK(detail::SmoothStep(0.5).s == doctest::Approx(0.5).epsilon(1e-14));
  // symmetry S(x) + S(1-x) = 1
  for (double x : {0.1, 0.3, 0.45, 0.7, 0.9})
    CHECK(detail::SmoothStep(x).s + detail::SmoothStep(1.0 - x).s ==
          doctest::Approx(1.0).epsilon(1e-14));
  // analytic derivatives match central differences away from the ends
  const double h = 1e-6;
  for (double x : {0.2, 0.5, 0.8}) {
    const double ds_fd =
        (detail::SmoothStep(x + h).s - detail::SmoothStep(x - h).s) / (2 * h);
    CHECK(detail::SmoothStep(x).ds == doctest::Approx(ds_fd).epsilon(1e-6));
    const double d2s_fd = (detail::SmoothStep(x + h).ds -
                           detail::SmoothStep(x - h).ds) /
                          (2 * h);
    CHECK(detail::SmoothStep(x).d2s == doctest::Approx(d2s_fd).epsilon(1e-5));
  }
  // derivatives vanish exactly on the plateaus
  CHECK(detail::SmoothStep(-1.0).ds == 0.0);
  CHECK(detail::SmoothStep(2.0).ds == 0.0);
}

TEST_CASE("cutoff plateaus, support, and initial vanishing are exact") {
  Cutoff c = build_cutoff(1.0, 0.1, 0.2);
  // plateau: identically one on [0, rho/2] x [tau, T]
  for (double r : {0.0, 0.2, 0.5})
    for (double t : {0.1, 0.15, 0.2}) {
      CHECK(c.value(r, t) == 1.0);
      CHECK(c.ddr(r, t) == 0.0);
      CHECK(c.ddt(r, t) == 0.0);
    }
  // support: zero beyond rho and at t = 0, exactly
  for (double r : {1.0, 1.05, 2.0}) CHECK(c.value(r, 0.15) == 0.0);
  for (double r : {0.0, 0.4, 0.9}) CHECK(c.value(r, 0.0) == 0.0);
  // strictly between 0 and 1 in the transition band
  CHECK(c.value(0.75, 0.15) > 0.0);
  CHECK(c.value(0.75, 0.15) < 1.0);
}

TEST_CASE("radial slope is never positive") {
  Cutoff c = build_cutoff(1.0, 0.1, 0.2);
  for (int i = 0; i <= 400; ++i) {
    const double r = 1.2 * i / 400.0;
    CHECK(c.ddr(r, 0.15) <= 1e-14);
  }
}

TEST_CASE("scaling rho rescales the derivative constants exactly") {
  Cutoff a = build_cutoff(1.0, 0.1, 0.2);
  Cutoff b = build_cutoff(3.0, 0.1, 0.2);
  // psi_b(3r, t) = psi_a(r, t); dpsi_b/dr = dpsi_a/dr / 3
  for (double r : {0.3, 0.6, 0.8, 0.95}) {
    CHECK(b.value(3.0 * r, 0.15) == doctest::Approx(a.value(r, 0.15)).epsilon(1e-13));
    CHECK(b.ddr(3.0 * r, 0.15) ==
          doctest::Approx(a.ddr(r, 0.15) / 3.0).epsilon(1e-13));
    CHECK(b.d2dr2(3.0 * r, 0.15) ==
          doctest::Approx(a.d2dr2(r, 0.15) / 9.0).epsilon(1e-13));
  }
  // so the dimensionless measured constants agree across rho
  CutoffConstants ca = measure_cutoff(a, 200, 50);
  CutoffConstants cb = measure_cutoff(b, 200, 50);
  CHECK(ca.c_bar == doctest::Approx(cb.c_bar).epsilon(1e-12));
  CHECK(ca.c_half == doctest::Approx(cb.c_half).epsilon(1e-12));
  CHECK(ca.c_34 == doctest::Approx(cb.c_34).epsilon(1e-12));
}

TEST_CASE("measured constants are finite and stable under grid refinement") {
  Cutoff c = build_cutoff(1.0, 0.1, 0.2);
  EstimateReport rep = verify_cutoff(c, 100, 100);
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.extras.at("c_bar")));
  CHECK(std::isfinite(rep.extras.at("c_half")));
  CHECK(std::isfinite(rep.extras.at("c_34")));
  CHECK(rep.extras.at("c_bar") > 0.0);
  // exponent 3/4 pays a much larger constant than 1/2: the a -> 1 blow-up
  CHECK(rep.extras.at("c_34") > 10.0 * rep.extras.at("c_half"));
  CHECK(rep.extras.at("drift_c_bar") <= 0.1);
  CHECK(rep.extras.at("drift_c_half") <= 0.1);
  CHECK(rep.extras.at("drift_c_34") <= 0.1);
  CHECK(rep.extras.at("samples") >= 100.0 * 100.0);
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(build_cutoff(1.0, 0.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_cutoff(1.0, 0.3, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_cutoff(-1.0, 0.1, 0.2), std::invalid_argument);
}
