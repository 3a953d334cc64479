#include "sohr/vmf.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sohr {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

NoiseParam::NoiseParam(double d) : d_(d) {
  if (!(d >= kMin && d <= kMax)) {
    throw std::domain_error("NoiseParam: d = " + std::to_string(d) +
                            " outside supported range [0.05, 20]");
  }
}

VmfProfile vmf_profile(NoiseParam d, const AngularGrid& grid) {
  VmfProfile p{d, &grid, {}, 0.0};
  p.values.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) p.values[j] = std::exp(grid.cos_theta[j] / d.value());
  p.z_d = trapezoid_periodic(grid, p.values);
  for (double& v : p.values) v /= p.z_d;
  return p;
}

double c1(NoiseParam d) {
  const double x = 1.0 / d.value();
  return bessel_i(1, x) / bessel_i(0, x);
}

std::vector<double> g_profile(NoiseParam d, const AngularGrid& grid) {
  const int n = grid.n;
  std::vector<double> f(n);
  for (int j = 0; j < n; ++j) f[j] = std::exp(-grid.cos_theta[j] / d.value());
  const auto cum = spectral_running_integral(grid, f);
  const double cum_pi = cum[n / 2];
  std::vector<double> g(n);
  for (int j = 0; j < n; ++j) {
    g[j] = d.value() * grid.nodes[j] - d.value() * kPi * cum[j] / cum_pi;
  }
  return g;
}

C2Formulations c2_formulations(NoiseParam d, const AngularGrid& grid) {
  const int n = grid.n;
  const auto g = g_profile(d, grid);
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = std::exp(grid.cos_theta[j] / d.value());

  // Half-range [0, pi] trapezoid. The integrands extend to even periodic
  // functions, so the rule keeps spectral accuracy here.
  auto half_range = [&](auto&& integrand) {
    double sum = 0.5 * (integrand(0) + integrand(n / 2));
    for (int j = 1; j < n / 2; ++j) sum += integrand(j);
    return sum * grid.weight;
  };

  C2Formulations out;

  const double num_g =
      half_range([&](int j) { return w[j] * g[j] * grid.sin_theta[j] * grid.cos_theta[j]; });
  const double den_g = half_range([&](int j) { return w[j] * g[j] * grid.sin_theta[j]; });
  if (std::abs(den_g) < 1e-14) throw std::runtime_error("c2: denominator below 1e-14");
  out.from_g = num_g / den_g;

  // h(cos theta) = g/sin with L'Hopital values at the axis nodes.
  const auto gp = spectral_derivative(grid, g);
  std::vector<double> h(n / 2 + 1);
  h[0] = gp[0];
  h[n / 2] = -gp[n / 2];
  for (int j = 1; j < n / 2; ++j) h[j] = g[j] / grid.sin_theta[j];
  const double num_h = half_range([&](int j) {
    const double s2 = grid.sin_theta[j] * grid.sin_theta[j];
    return w[j] * s2 * h[j] * grid.cos_theta[j];
  });
  const double den_h = half_range([&](int j) {
    const double s2 = grid.sin_theta[j] * grid.sin_theta[j];
    return w[j] * s2 * h[j];
  });
  out.from_h = num_h / den_h;

  // Full-circle form with the VMF weight; h extended evenly.
  const auto vmf = vmf_profile(d, grid);
  std::vector<double> hf(n);
  for (int j = 0; j <= n / 2; ++j) hf[j] = h[j];
  for (int j = n / 2 + 1; j < n; ++j) hf[j] = h[n - j];
  std::vector<double> numc(n), denc(n);
  for (int j = 0; j < n; ++j) {
    const double s2 = 1.0 - grid.cos_theta[j] * grid.cos_theta[j];
    denc[j] = vmf.values[j] * s2 * hf[j];
    numc[j] = denc[j] * grid.cos_theta[j];
  }
  out.from_circle = trapezoid_periodic(grid, numc) / trapezoid_periodic(grid, denc);
  return out;
}

double c2(NoiseParam d, const AngularGrid& grid) {
  const auto f = c2_formulations(d, grid);
  if (std::abs(f.from_g - f.from_h) > 1e-9 || std::abs(f.from_g - f.from_circle) > 1e-9) {
    throw std::runtime_error("c2: formulations disagree beyond 1e-9");
  }
  return f.from_g;
}

double c5(NoiseParam d, const AngularGrid& grid) {
  const int n = grid.n;
  std::vector<double> num(n), den(n);
  for (int j = 0; j < n; ++j) {
    const double w = std::exp(grid.cos_theta[j] / d.value());
    num[j] = w * grid.sin_theta[j] * grid.sin_theta[j];
    den[j] = w * grid.cos_theta[j];
  }
  const double quad = trapezoid_periodic(grid, num) / trapezoid_periodic(grid, den);
  const double x = 1.0 / d.value();
  const double bessel = 0.5 * (bessel_i(0, x) - bessel_i(2, x)) / bessel_i(1, x);
  if (std::abs(quad - bessel) > 1e-10 * std::max(1.0, std::abs(bessel))) {
    throw std::runtime_error("c5: quadrature and Bessel forms disagree beyond 1e-10");
  }
  return quad;
}

}  // namespace sohr
