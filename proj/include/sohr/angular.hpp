#pragma once

#include <complex>
#include <span>
#include <vector>

// Periodic angular grids, quadrature and Fourier utilities, modified Bessel
// functions. Shared numeric substrate for every profile computation on the
// circle.

namespace sohr {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Uniform periodic grid on [0, 2*pi): theta_j = 2*pi*j/n.
struct AngularGrid {
  int n = 0;
  std::vector<double> nodes;
  double weight = 0.0;  // 2*pi/n

  // Precomputed tables; same length as nodes.
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;
};

// Builds the uniform grid. n must be even and >= 8 so that the parity map
// theta -> -theta lands on grid nodes.
AngularGrid periodic_grid(int n);

// Periodic trapezoid rule: weight * sum(samples). Spectrally accurate for
// smooth periodic integrands.
double trapezoid_periodic(const AngularGrid& grid, std::span<const double> samples);

// Modified Bessel function of the first kind I_k(x), k in {0,1,2}, x >= 0.
// Power series for x <= 15, quadrature of the integral form above.
double bessel_i(int k, double x);

// Fourier coefficients c_m = (1/n) sum_j f_j exp(-i m theta_j), m = 0..n-1
// (standard DFT layout; negative modes live at m-n).
std::vector<std::complex<double>> fourier_coeffs(std::span<const double> samples);

// Samples of sum_m c_m exp(i m theta_j) on the same grid.
std::vector<double> fourier_synthesis(std::span<const std::complex<double>> coeffs);

// Signed mode index for DFT slot m of an n-point transform.
inline int signed_mode(int m, int n) { return (m <= n / 2) ? m : m - n; }

// d/dtheta of the trigonometric interpolant, sampled on the grid.
// The unpaired Nyquist mode is dropped.
std::vector<double> spectral_derivative(const AngularGrid& grid, std::span<const double> samples);

// Same, but coefficients below rel_floor * max|coeff| are zeroed first.
// Differentiation amplifies the round-off tail of sampled data by m^2; for
// residual diagnostics of analytic profiles that tail is pure noise.
std::vector<double> spectral_derivative_filtered(const AngularGrid& grid,
                                                 std::span<const double> samples,
                                                 double rel_floor = 1e-13);

// F_j = integral of the trigonometric interpolant from 0 to theta_j.
// Carries the secular c_0*theta term, so F is periodic only when the mean
// of `samples` vanishes.
std::vector<double> spectral_running_integral(const AngularGrid& grid,
                                              std::span<const double> samples);

// Solves a complex tridiagonal system with partial pivoting.
// sub[i] couples x[i-1] (sub[0] unused), super[i] couples x[i+1]
// (super[k-1] unused). Overwrites nothing; returns x.
std::vector<std::complex<double>> tridiag_solve(std::vector<std::complex<double>> sub,
                                                std::vector<std::complex<double>> diag,
                                                std::vector<std::complex<double>> super,
                                                std::vector<std::complex<double>> rhs);

}  // namespace sohr
