#include "sohr/angular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sohr {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT. sign = -1 forward, +1 inverse (unscaled).
void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
  const int n = static_cast<int>(a.size());
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / len;
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// O(n^2) DFT fallback for even grid sizes that are not powers of two.
std::vector<std::complex<double>> dft_naive(std::span<const std::complex<double>> a, int sign) {
  const int n = static_cast<int>(a.size());
  std::vector<std::complex<double>> out(n);
  for (int m = 0; m < n; ++m) {
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const double ang = sign * kTwoPi * m * j / n;
      acc += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[m] = acc;
  }
  return out;
}

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> in, int sign) {
  const int n = static_cast<int>(in.size());
  if (is_power_of_two(n)) {
    std::vector<std::complex<double>> a(in.begin(), in.end());
    fft_pow2(a, sign);
    return a;
  }
  return dft_naive(in, sign);
}

double bessel_i_series(int k, double x) {
  // I_k(x) = sum_m (x/2)^(2m+k) / (m! (m+k)!)
  const double half = 0.5 * x;
  double term = 1.0;
  for (int j = 1; j <= k; ++j) term *= half / j;
  double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= half * half / (static_cast<double>(m) * (m + k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double bessel_i_quadrature(int k, double x) {
  // (1/pi) * integral_0^pi exp(x cos t) cos(k t) dt, periodic trapezoid at
  // n = 1024 over the full circle.
  constexpr int n = 1024;
  const double h = kTwoPi / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = h * j;
    sum += std::exp(x * std::cos(t)) * std::cos(k * t);
  }
  return sum * h / kTwoPi;
}

}  // namespace

AngularGrid periodic_grid(int n) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("periodic_grid: n must be even and >= 8 (got " +
                                std::to_string(n) + ")");
  }
  AngularGrid g;
  g.n = n;
  g.weight = kTwoPi / n;
  g.nodes.resize(n);
  g.cos_theta.resize(n);
  g.sin_theta.resize(n);
  for (int j = 0; j < n; ++j) {
    g.nodes[j] = g.weight * j;
    g.cos_theta[j] = std::cos(g.nodes[j]);
    g.sin_theta[j] = std::sin(g.nodes[j]);
  }
  return g;
}

double trapezoid_periodic(const AngularGrid& grid, std::span<const double> samples) {
  if (static_cast<int>(samples.size()) != grid.n) {
    throw std::invalid_argument("trapezoid_periodic: samples length " +
                                std::to_string(samples.size()) + " != grid size " +
                                std::to_string(grid.n));
  }
  double sum = 0.0;
  for (double v : samples) sum += v;
  return grid.weight * sum;
}

double bessel_i(int k, double x) {
  if (k < 0 || k > 2) throw std::invalid_argument("bessel_i: order must be 0, 1 or 2");
  if (x < 0.0) throw std::invalid_argument("bessel_i: argument must be nonnegative");
  if (x > 700.0) throw std::overflow_error("bessel_i: argument above supported range (700)");
  if (x <= 15.0) return bessel_i_series(k, x);
  return bessel_i_quadrature(k, x);
}

std::vector<std::complex<double>> fourier_coeffs(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<std::complex<double>> a(n);
  for (int j = 0; j < n; ++j) a[j] = samples[j];
  auto out = transform(a, -1);
  for (auto& c : out) c /= static_cast<double>(n);
  return out;
}

std::vector<double> fourier_synthesis(std::span<const std::complex<double>> coeffs) {
  auto out = transform(coeffs, +1);
  std::vector<double> re(out.size());
  for (size_t j = 0; j < out.size(); ++j) re[j] = out[j].real();
  return re;
}

std::vector<double> spectral_derivative(const AngularGrid& grid, std::span<const double> samples) {
  auto c = fourier_coeffs(samples);
  const int n = grid.n;
  for (int m = 0; m < n; ++m) {
    const int sm = signed_mode(m, n);
    if (std::abs(2 * sm) == n) {
      c[m] = 0.0;  // Nyquist has no well-defined odd derivative
    } else {
      c[m] *= std::complex<double>(0.0, sm);
    }
  }
  return fourier_synthesis(c);
}

std::vector<double> spectral_derivative_filtered(const AngularGrid& grid,
                                                 std::span<const double> samples,
                                                 double rel_floor) {
  auto c = fourier_coeffs(samples);
  const int n = grid.n;
  double cmax = 0.0;
  for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
  const double floor = rel_floor * cmax;
  for (int m = 0; m < n; ++m) {
    const int sm = signed_mode(m, n);
    if (std::abs(c[m]) < floor || std::abs(2 * sm) == n) {
      c[m] = 0.0;
    } else {
      c[m] *= std::complex<double>(0.0, sm);
    }
  }
  return fourier_synthesis(c);
}

std::vector<double> spectral_running_integral(const AngularGrid& grid,
                                              std::span<const double> samples) {
  auto c = fourier_coeffs(samples);
  const int n = grid.n;
  const double mean = c[0].real();
  std::vector<std::complex<double>> ic(n, std::complex<double>(0.0, 0.0));
  for (int m = 1; m < n; ++m) {
    const int sm = signed_mode(m, n);
    if (std::abs(2 * sm) == n) continue;
    ic[m] = c[m] / std::complex<double>(0.0, sm);
  }
  auto osc = fourier_synthesis(ic);
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = mean * grid.nodes[j] + (osc[j] - osc[0]);
  return out;
}

std::vector<std::complex<double>> tridiag_solve(std::vector<std::complex<double>> sub,
                                                std::vector<std::complex<double>> diag,
                                                std::vector<std::complex<double>> super,
                                                std::vector<std::complex<double>> rhs) {
  const int k = static_cast<int>(diag.size());
  if (k == 0) return {};
  // Partial pivoting fills one extra superdiagonal.
  std::vector<std::complex<double>> super2(k, {0.0, 0.0});
  for (int i = 0; i + 1 < k; ++i) {
    if (std::abs(sub[i + 1]) > std::abs(diag[i])) {
      std::swap(diag[i], sub[i + 1]);
      std::swap(super[i], diag[i + 1]);
      std::swap(super2[i], super[i + 1]);
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (diag[i] == std::complex<double>(0.0, 0.0)) {
      throw std::runtime_error("tridiag_solve: zero pivot");
    }
    const std::complex<double> f = sub[i + 1] / diag[i];
    diag[i + 1] -= f * super[i];
    super[i + 1] -= f * super2[i];
    rhs[i + 1] -= f * rhs[i];
  }
  std::vector<std::complex<double>> x(k);
  for (int i = k - 1; i >= 0; --i) {
    std::complex<double> acc = rhs[i];
    if (i + 1 < k) acc -= super[i] * x[i + 1];
    if (i + 2 < k) acc -= super2[i] * x[i + 2];
    if (diag[i] == std::complex<double>(0.0, 0.0)) {
      throw std::runtime_error("tridiag_solve: singular system");
    }
    x[i] = acc / diag[i];
  }
  return x;
}

}  // namespace sohr
