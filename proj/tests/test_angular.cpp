#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "sohr/angular.hpp"

using namespace sohr;

namespace {

// Independent power-series oracle for the quadrature and Bessel tests.
double bessel_series_oracle(int k, double x, int terms = 40) {
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

TEST_CASE("periodic_grid basics") {
  const auto g = periodic_grid(8);
  CHECK(g.n == 8);
  CHECK(g.weight == doctest::Approx(kTwoPi / 8).epsilon(1e-15));
  for (int j = 0; j < 8; ++j) {
    CHECK(g.nodes[j] == doctest::Approx(j * kTwoPi / 8).epsilon(1e-15));
  }
  const auto big = periodic_grid(512);
  CHECK(big.nodes[256] == doctest::Approx(3.14159265358979323846).epsilon(1e-15));

  CHECK_THROWS_AS(periodic_grid(7), std::invalid_argument);
  CHECK_THROWS_AS(periodic_grid(6), std::invalid_argument);
  CHECK_THROWS_WITH(periodic_grid(7), doctest::Contains("even"));
}

TEST_CASE("trapezoid_periodic on constants and odd functions") {
  const auto g = periodic_grid(64);
  std::vector<double> ones(g.n, 1.0);
  CHECK(trapezoid_periodic(g, ones) == doctest::Approx(kTwoPi).epsilon(1e-15));

  std::vector<double> s(g.n);
  for (int j = 0; j < g.n; ++j) s[j] = std::sin(g.nodes[j]);
  CHECK(std::abs(trapezoid_periodic(g, s)) < 1e-14);

  std::vector<double> wrong(g.n + 1, 0.0);
  CHECK_THROWS_AS(trapezoid_periodic(g, wrong), std::invalid_argument);
}

TEST_CASE("trapezoid_periodic reproduces the Bessel integral") {
  const auto g = periodic_grid(512);
  std::vector<double> f(g.n);
  for (int j = 0; j < g.n; ++j) f[j] = std::exp(g.cos_theta[j]);
  const double expected = kTwoPi * bessel_series_oracle(0, 1.0, 30);
  CHECK(trapezoid_periodic(g, f) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pure Fourier modes integrate to zero") {
  const auto g = periodic_grid(64);
  for (int k : {1, 2, 7, 31}) {
    std::vector<double> cs(g.n), sn(g.n);
    for (int j = 0; j < g.n; ++j) {
      cs[j] = std::cos(k * g.nodes[j]);
      sn[j] = std::sin(k * g.nodes[j]);
    }
    CHECK(std::abs(trapezoid_periodic(g, cs)) < 1e-13);
    CHECK(std::abs(trapezoid_periodic(g, sn)) < 1e-13);
  }
}

TEST_CASE("quadrature is converged for smooth aligned profiles") {
  for (double d : {0.2, 1.0}) {
    const auto g64 = periodic_grid(64);
    const auto g128 = periodic_grid(128);
    std::vector<double> f64(64), f128(128);
    for (int j = 0; j < 64; ++j) f64[j] = std::exp(g64.cos_theta[j] / d);
    for (int j = 0; j < 128; ++j) f128[j] = std::exp(g128.cos_theta[j] / d);
    CHECK(std::abs(trapezoid_periodic(g64, f64) - trapezoid_periodic(g128, f128)) < 1e-12);
  }
}

TEST_CASE("bessel_i values and domain") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  CHECK(bessel_i(1, 0.0) == 0.0);
  CHECK(bessel_i(0, 1.0) == doctest::Approx(bessel_series_oracle(0, 1.0)).epsilon(1e-13));
  CHECK(bessel_i(0, 1.0) == doctest::Approx(1.26606587775201).epsilon(1e-12));

  CHECK_THROWS_AS(bessel_i(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i(0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i(0, 701.0), std::overflow_error);
}

TEST_CASE("bessel_i branches agree at the crossover") {
  // x = 15 sits on the series side; compare against a fine quadrature oracle.
  const int n = 4096;
  for (int k : {0, 1, 2}) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = kTwoPi * j / n;
      sum += std::exp(15.0 * std::cos(t)) * std::cos(k * t);
    }
    const double oracle = sum / n;
    CHECK(bessel_i(k, 15.0) == doctest::Approx(oracle).epsilon(1e-12));
  }
  // And the quadrature side against the series oracle just above.
  CHECK(bessel_i(0, 15.5) == doctest::Approx(bessel_series_oracle(0, 15.5, 60)).epsilon(1e-12));
}

TEST_CASE("bessel recurrence holds across the range") {
  for (double x = 0.1; x <= 100.0; x *= 1.45) {
    const double lhs = bessel_i(0, x) - bessel_i(2, x) - 2.0 / x * bessel_i(1, x);
    CHECK(std::abs(lhs) <= 1e-10 * bessel_i(0, x));
  }
}

TEST_CASE("spectral derivative and running integral") {
  const auto g = periodic_grid(128);
  std::vector<double> f(g.n);
  for (int j = 0; j < g.n; ++j) f[j] = std::sin(g.nodes[j]) + 0.3 * std::cos(3 * g.nodes[j]);
  const auto df = spectral_derivative(g, f);
  for (int j = 0; j < g.n; ++j) {
    const double exact = std::cos(g.nodes[j]) - 0.9 * std::sin(3 * g.nodes[j]);
    CHECK(df[j] == doctest::Approx(exact).epsilon(1e-12));
  }
  const auto F = spectral_running_integral(g, f);
  for (int j = 0; j < g.n; ++j) {
    const double exact = (1.0 - std::cos(g.nodes[j])) + 0.1 * std::sin(3 * g.nodes[j]);
    CHECK(F[j] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("tridiag_solve with pivoting") {
  using cplx = std::complex<double>;
  const int n = 40;
  std::vector<cplx> sub(n), diag(n), super(n), x_ref(n);
  for (int i = 0; i < n; ++i) {
    sub[i] = cplx(0.3, -0.1 * i);
    diag[i] = cplx(0.01 * i - 1.0, 1.0 + i);  // small pivots early on
    super[i] = cplx(-0.7, 0.2);
    x_ref[i] = cplx(std::sin(0.1 * i), std::cos(0.2 * i));
  }
  std::vector<cplx> rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs[i] = diag[i] * x_ref[i];
    if (i > 0) rhs[i] += sub[i] * x_ref[i - 1];
    if (i + 1 < n) rhs[i] += super[i] * x_ref[i + 1];
  }
  const auto x = tridiag_solve(sub, diag, super, rhs);
  for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - x_ref[i]) < 1e-12);
}

TEST_CASE("non-power-of-two grids still transform correctly") {
  const auto g = periodic_grid(12);
  std::vector<double> f(g.n);
  for (int j = 0; j < g.n; ++j) f[j] = std::cos(2 * g.nodes[j]);
  const auto df = spectral_derivative(g, f);
  for (int j = 0; j < g.n; ++j) {
    CHECK(df[j] == doctest::Approx(-2.0 * std::sin(2 * g.nodes[j])).epsilon(1e-12));
  }
}
