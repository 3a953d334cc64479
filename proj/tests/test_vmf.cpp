#include <cmath>
#include <vector>

#include "doctest.h"
#include "sohr/angular.hpp"
#include "sohr/vmf.hpp"

using namespace sohr;

namespace {

double bessel_series_oracle(int k, double x, int terms = 60) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int j = 1; j <= k; ++j) term *= half / j;
  double sum = term;
  for (int m = 1; m < terms; ++m) {
    term *= half * half / (static_cast<double>(m) * (m + k));
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("NoiseParam range") {
  CHECK_NOTHROW(NoiseParam(0.05));
  CHECK_NOTHROW(NoiseParam(20.0));
  CHECK_THROWS_AS(NoiseParam(0.01), std::domain_error);
  CHECK_THROWS_AS(NoiseParam(25.0), std::domain_error);
  CHECK_THROWS_AS(NoiseParam(-1.0), std::domain_error);
}

TEST_CASE("vmf_profile invariants and values") {
  const auto grid = periodic_grid(512);
  for (double dv : {0.2, 1.0, 5.0, 20.0}) {
    const auto p = vmf_profile(NoiseParam(dv), grid);
    for (double v : p.values) CHECK(v > 0.0);
    CHECK(trapezoid_periodic(grid, p.values) == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < grid.n; ++j) {
      CHECK(std::abs(p.values[j] - p.values[(grid.n - j) % grid.n]) < 1e-12);
    }
    const double z_ref = kTwoPi * bessel_series_oracle(0, 1.0 / dv);
    CHECK(p.z_d == doctest::Approx(z_ref).epsilon(1e-10));
  }

  // Flat limit: linearized bound with a factor-3 margin.
  const auto flat = vmf_profile(NoiseParam(20.0), grid);
  double sup = 0.0;
  for (double v : flat.values) sup = std::max(sup, std::abs(v - 1.0 / kTwoPi));
  CHECK(sup < 3.0 / (kTwoPi * 20.0));

  // Peak value at d = 1.
  const auto p1 = vmf_profile(NoiseParam(1.0), grid);
  CHECK(p1.values[0] ==
        doctest::Approx(std::exp(1.0) / (kTwoPi * bessel_series_oracle(0, 1.0))).epsilon(1e-10));
}

TEST_CASE("c1 values and monotonicity") {
  CHECK(c1(NoiseParam(1.0)) ==
        doctest::Approx(bessel_series_oracle(1, 1.0) / bessel_series_oracle(0, 1.0))
            .epsilon(1e-10));
  CHECK(c1(NoiseParam(0.05)) > 0.97);
  CHECK(c1(NoiseParam(20.0)) == doctest::Approx(1.0 / 40.0).epsilon(0.05));

  double prev = 2.0;
  for (double dv = 0.05; dv <= 20.0; dv += 0.05) {
    const double v = c1(NoiseParam(dv));
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("g_profile endpoints, parity, refinement oracle") {
  const auto grid = periodic_grid(512);
  NoiseParam d(1.0);
  const auto g = g_profile(d, grid);
  CHECK(std::abs(g[0]) < 1e-14);
  CHECK(std::abs(g[grid.n / 2]) < 1e-13);
  for (int j = 0; j < grid.n; ++j) {
    CHECK(std::abs(g[j] + g[(grid.n - j) % grid.n]) < 1e-12);
  }
  // Refinement oracle at 8x resolution, compared at theta = pi/2.
  const auto fine = periodic_grid(4096);
  const auto gf = g_profile(d, fine);
  CHECK(std::abs(g[512 / 4] - gf[4096 / 4]) < 1e-8);
}

TEST_CASE("g_profile satisfies its conservation form") {
  const auto grid = periodic_grid(512);
  for (double dv : {0.2, 1.0, 5.0}) {
    NoiseParam d(dv);
    const auto g = g_profile(d, grid);
    const auto gp = spectral_derivative(grid, g);
    std::vector<double> flux(grid.n);
    for (int j = 0; j < grid.n; ++j) flux[j] = std::exp(grid.cos_theta[j] / dv) * gp[j];
    const auto dflux = spectral_derivative_filtered(grid, flux);
    double sup = 0.0;
    for (int j = 0; j < grid.n; ++j) {
      sup = std::max(sup,
                     std::abs(-dflux[j] - grid.sin_theta[j] * std::exp(grid.cos_theta[j] / dv)));
    }
    CHECK(sup < 1e-6);
  }
}

TEST_CASE("c2 formulations agree and match the refinement oracle") {
  const auto grid = periodic_grid(512);
  {
    const auto f = c2_formulations(NoiseParam(0.2), grid);
    CHECK(std::abs(f.from_g - f.from_h) < 1e-9);
    CHECK(std::abs(f.from_g - f.from_circle) < 1e-9);
  }
  const double v512 = c2(NoiseParam(1.0), grid);
  const double v4096 = c2(NoiseParam(1.0), periodic_grid(4096));
  CHECK(std::abs(v512 - v4096) < 1e-10);

  // Concentration limit: integrands pile up near theta = 0 where cos = 1.
  CHECK(c2(NoiseParam(0.05), grid) > 0.9);
  CHECK(c2(NoiseParam(0.05), grid) < 1.0);
}

TEST_CASE("c5 equals the noise parameter through the recurrence") {
  const auto grid = periodic_grid(512);
  for (double dv : {0.2, 1.0, 5.0}) {
    CHECK(std::abs(c5(NoiseParam(dv), grid) - dv) < 1e-10);
  }
}
