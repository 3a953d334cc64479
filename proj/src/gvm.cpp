#include "sohr/gvm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sohr {

namespace {

// Common validation for (d, w) against the exponent guard.
void check_w_guard(NoiseParam d, double w) {
  if (std::abs(w) * kTwoPi / d.value() > 700.0) {
    throw std::domain_error("solve_gvm: |w|*2*pi/d = " +
                            std::to_string(std::abs(w) * kTwoPi / d.value()) +
                            " exceeds the overflow guard (700); max |w| here is " +
                            std::to_string(gvm_w_guard(d.value())));
  }
}

}  // namespace

GvmProfile solve_gvm(NoiseParam d, double w, const AngularGrid& grid) {
  check_w_guard(d, w);
  const int n = grid.n;
  const double dv = d.value();

  GvmProfile out{d, w, grid, {}, 0.0, 0.0, 0.0, 0.0, 0.0};

  // Fourier-Galerkin on the first integral Phi' - (1/d)(w - sin)Phi = C:
  // mode m >= 1 obeys
  //   (i m - w/d) phi_m - (i/(2d)) phi_{m-1} + (i/(2d)) phi_{m+1} = 0,
  // with phi_0 = 1/(2 pi) (unit mass) and phi_{M+1} = 0. One complex
  // tridiagonal chain; phi_{-m} = conj(phi_m). At w = 0 the m = 1 row is
  // the I-Bessel recurrence, so the VMF limit is exact by construction.
  const int kmax = n / 2 - 1;
  const double phi0 = 1.0 / kTwoPi;
  std::vector<std::complex<double>> sub(kmax), diag(kmax), super(kmax), rhs(kmax);
  const std::complex<double> off(0.0, 1.0 / (2.0 * dv));
  for (int m = 1; m <= kmax; ++m) {
    sub[m - 1] = -off;
    diag[m - 1] = std::complex<double>(-w / dv, m);
    super[m - 1] = off;
    rhs[m - 1] = 0.0;
  }
  rhs[0] = off * phi0;
  const auto chain = tridiag_solve(std::move(sub), std::move(diag), std::move(super),
                                   std::move(rhs));

  std::vector<std::complex<double>> coeffs(n, {0.0, 0.0});
  coeffs[0] = phi0;
  for (int m = 1; m <= kmax; ++m) {
    coeffs[m] = chain[m - 1];
    coeffs[n - m] = std::conj(chain[m - 1]);
  }
  out.phi = fourier_synthesis(coeffs);
  // m = 0 row of the same system.
  out.c_const = -(w / dv) * phi0 - chain[0].imag() / dv;

  double phi_min = out.phi[0], phi_max = out.phi[0];
  for (double v : out.phi) {
    phi_min = std::min(phi_min, v);
    phi_max = std::max(phi_max, v);
  }
  if (!(phi_min > -1e-12 * phi_max)) {
    throw std::runtime_error("solve_gvm: non-positive profile value");
  }

  std::vector<double> tmp(n);
  for (int j = 0; j < n; ++j) tmp[j] = out.phi[j] * grid.cos_theta[j];
  const double fx = trapezoid_periodic(grid, tmp);
  for (int j = 0; j < n; ++j) tmp[j] = out.phi[j] * grid.sin_theta[j];
  const double fy = trapezoid_periodic(grid, tmp);
  out.c1_tilde = std::hypot(fx, fy);
  if (out.c1_tilde < 1e-12) throw std::runtime_error("solve_gvm: degenerate flux, psi undefined");
  out.psi = std::atan2(fy, fx);

  for (int j = 0; j < n; ++j) {
    tmp[j] = grid.sin_theta[j] * std::sin(grid.nodes[j] - out.psi) * out.phi[j];
  }
  out.lambda = trapezoid_periodic(grid, tmp) / (dv * out.c1_tilde);

  // Defect of Phi'' - (1/d)((w - sin)Phi)' via spectral differentiation.
  // Round-off coefficient tails are filtered out before differentiating.
  const auto dphi = spectral_derivative_filtered(grid, out.phi);
  std::vector<double> flux(n);
  for (int j = 0; j < n; ++j) flux[j] = (w - grid.sin_theta[j]) * out.phi[j] / dv;
  const auto dflux = spectral_derivative_filtered(grid, flux);
  const auto ddphi = spectral_derivative_filtered(grid, dphi);
  double res = 0.0;
  for (int j = 0; j < n; ++j) res = std::max(res, std::abs(ddphi[j] - dflux[j]));
  out.residual_sup = res;
  if (res > 1e-8) {
    throw std::runtime_error("solve_gvm: equilibrium residual " + std::to_string(res) +
                             " above tolerance");
  }
  return out;
}

std::pair<GvmProfile, GvmProfile> gvm_parity_pair(NoiseParam d, double w,
                                                  const AngularGrid& grid) {
  auto plus = solve_gvm(d, w, grid);
  auto minus = solve_gvm(d, -w, grid);
  double defect = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const int mj = (grid.n - j) % grid.n;
    defect = std::max(defect, std::abs(minus.phi[j] - plus.phi[mj]));
  }
  if (defect > 1e-10) {
    throw std::runtime_error("gvm_parity_pair: mirror identity violated by " +
                             std::to_string(defect));
  }
  return {std::move(plus), std::move(minus)};
}

Vec2 omega_direction(double psi, Vec2 Omega) {
  if (std::abs(norm(Omega) - 1.0) > 1e-12) {
    throw std::invalid_argument("omega_direction: Omega must be a unit vector");
  }
  return rotate(Omega, -psi);
}

}  // namespace sohr
