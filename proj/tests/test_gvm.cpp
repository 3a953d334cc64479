#include <cmath>
#include <vector>

#include "doctest.h"
#include "sohr/gvm.hpp"

using namespace sohr;

TEST_CASE("zero-rotation equilibrium is the aligned profile") {
  const auto grid = periodic_grid(512);
  for (double dv : {0.2, 1.0, 5.0}) {
    NoiseParam d(dv);
    const auto gvm = solve_gvm(d, 0.0, grid);
    const auto vmf = vmf_profile(d, grid);
    double sup = 0.0;
    for (int j = 0; j < grid.n; ++j) sup = std::max(sup, std::abs(gvm.phi[j] - vmf.values[j]));
    CHECK(sup < 1e-10);
    CHECK(std::abs(gvm.psi) < 1e-12);
    CHECK(gvm.c1_tilde == doctest::Approx(c1(d)).epsilon(1e-10));
    CHECK(gvm.c_const == 0.0);
  }
}

TEST_CASE("profile invariants over the test matrix") {
  const auto grid = periodic_grid(512);
  for (double dv : {0.2, 1.0, 5.0}) {
    for (double w : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0, 20.0,
                     -20.0}) {
      NoiseParam d(dv);
      if (std::abs(w) > gvm_w_guard(dv)) continue;
      const auto gvm = solve_gvm(d, w, grid);
      CHECK(trapezoid_periodic(grid, gvm.phi) == doctest::Approx(1.0).epsilon(1e-10));
      for (double v : gvm.phi) CHECK(v > -1e-12);
      CHECK(gvm.residual_sup <= 1e-8);
      CHECK(gvm.c1_tilde >= 0.0);
      CHECK(gvm.c1_tilde <= 1.0);
      // Exactness of psi: the flux orthogonal to the mean direction vanishes.
      std::vector<double> f(grid.n);
      for (int j = 0; j < grid.n; ++j) {
        f[j] = gvm.phi[j] * std::sin(grid.nodes[j] - gvm.psi);
      }
      CHECK(std::abs(trapezoid_periodic(grid, f)) < 1e-10);
    }
  }
}

TEST_CASE("fast rotation flattens the profile") {
  const auto grid = periodic_grid(512);
  const auto gvm = solve_gvm(NoiseParam(1.0), 20.0, grid);
  double sup = 0.0;
  for (double v : gvm.phi) sup = std::max(sup, std::abs(v - 1.0 / kTwoPi));
  CHECK(sup < 0.02);
}

TEST_CASE("tilt angle at low noise is about one radian") {
  const auto grid = periodic_grid(512);
  const auto gvm = solve_gvm(NoiseParam(0.2), 1.0, grid);
  CHECK(gvm.psi >= 0.5);
  CHECK(gvm.psi <= 1.5);
}

TEST_CASE("mirror pairs") {
  const auto grid = periodic_grid(512);
  {
    const auto [p, m] = gvm_parity_pair(NoiseParam(1.0), 0.0, grid);
    for (int j = 0; j < grid.n; ++j) CHECK(p.phi[j] == doctest::Approx(m.phi[j]).epsilon(1e-14));
  }
  {
    const auto [p, m] = gvm_parity_pair(NoiseParam(1.0), 1.0, grid);
    (void)p;
    (void)m;  // throws internally when the mirror identity fails at 1e-10
  }
  {
    const auto [p, m] = gvm_parity_pair(NoiseParam(0.2), 5.0, grid);
    CHECK(std::abs(p.c1_tilde - m.c1_tilde) < 1e-10);
    CHECK(std::abs(p.psi + m.psi) < 1e-10);
    CHECK(std::abs(p.lambda - m.lambda) < 1e-10);
    CHECK(std::abs(p.c_const + m.c_const) < 1e-10);
  }
}

TEST_CASE("order parameter is grid-converged") {
  for (double dv : {0.2, 1.0}) {
    const auto a = solve_gvm(NoiseParam(dv), 1.0, periodic_grid(256));
    const auto b = solve_gvm(NoiseParam(dv), 1.0, periodic_grid(512));
    CHECK(std::abs(a.c1_tilde - b.c1_tilde) < 1e-10);
  }
}

TEST_CASE("overflow guard rejects extreme rotation") {
  const auto grid = periodic_grid(512);
  CHECK_THROWS_AS(solve_gvm(NoiseParam(0.2), 23.0, grid), std::domain_error);
}

TEST_CASE("omega_direction") {
  CHECK(omega_direction(0.0, {1.0, 0.0}).x == doctest::Approx(1.0));
  CHECK(omega_direction(0.0, {1.0, 0.0}).y == doctest::Approx(0.0));
  const auto r = omega_direction(kTwoPi / 4.0, {0.0, 1.0});
  CHECK(r.x == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(r.y) < 1e-14);
  CHECK_THROWS_AS(omega_direction(0.1, {1.1, 0.0}), std::invalid_argument);

  // Round trip: the equilibrium built on omega has flux direction Omega.
  const auto grid = periodic_grid(512);
  const auto gvm = solve_gvm(NoiseParam(0.2), 1.0, grid);
  const Vec2 Omega{std::cos(0.7), std::sin(0.7)};
  const Vec2 omega = omega_direction(gvm.psi, Omega);
  const double flux_angle = std::atan2(omega.y, omega.x) + gvm.psi;
  CHECK(std::abs(wrap_pm_pi(flux_angle - 0.7)) < 1e-8);
}
