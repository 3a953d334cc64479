#include "sohr/gci.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sohr {

namespace {

double quad_dot(const AngularGrid& grid, std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (int j = 0; j < grid.n; ++j) sum += a[j] * b[j];
  return sum * grid.weight;
}

// Dense Gaussian elimination with partial pivoting; overwrites a and b.
std::vector<double> dense_solve(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) throw std::runtime_error("dense_solve: singular system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    const double inv = 1.0 / a[col][col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] * inv;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

double diffusivity_of(const GvmProfile& gvm, GciForm form) {
  return form == GciForm::scaled ? gvm.d.value() : 1.0;
}

double compat_of(const GvmProfile& gvm) {
  const AngularGrid& grid = gvm.grid;
  double sum = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    sum += gvm.phi[j] * std::sin(grid.nodes[j] - gvm.psi);
  }
  return std::abs(sum * grid.weight);
}

}  // namespace

GciProfile solve_gci(const GvmProfile& gvm, GciForm form) {
  const AngularGrid& grid = gvm.grid;
  const int n = grid.n;
  const double delta = diffusivity_of(gvm, form);
  const double w = gvm.w;
  if (std::abs(w) * kTwoPi / delta > 700.0) {
    throw std::domain_error("solve_gci: overflow guard violated");
  }

  GciProfile out{gvm.d, w, grid, {}, gvm.psi, 0.0, 0.0};
  out.compat_residual = compat_of(gvm);
  if (out.compat_residual > 1e-8) {
    throw std::runtime_error("solve_gci: solvability violated, compat residual " +
                             std::to_string(out.compat_residual));
  }

  // Fourier-Galerkin: mode m of -delta X'' + (sin - w) X' = sin(theta - psi)
  // reads
  //   (delta m^2 - i w m) x_m + ((m-1)/2) x_{m-1} - ((m+1)/2) x_{m+1} = r_m.
  // x_0 = 0 (zero mean) and the m = 1 row does not touch x_0, so the
  // m = 1..M chain closes on itself; x_{-m} = conj(x_m). The untestable
  // m = 0 row is exactly the solvability condition.
  const int kmax = n / 2 - 1;
  std::vector<double> r(n);
  for (int j = 0; j < n; ++j) r[j] = std::sin(grid.nodes[j] - gvm.psi);
  const auto rc = fourier_coeffs(r);
  std::vector<std::complex<double>> sub(kmax), diag(kmax), super(kmax), rhs(kmax);
  for (int m = 1; m <= kmax; ++m) {
    sub[m - 1] = 0.5 * (m - 1);
    diag[m - 1] = std::complex<double>(delta * m * m, -w * m);
    super[m - 1] = -0.5 * (m + 1);
    rhs[m - 1] = rc[m];
  }
  const auto chain = tridiag_solve(std::move(sub), std::move(diag), std::move(super),
                                   std::move(rhs));
  std::vector<std::complex<double>> xc(n, {0.0, 0.0});
  for (int m = 1; m <= kmax; ++m) {
    xc[m] = chain[m - 1];
    xc[n - m] = std::conj(chain[m - 1]);
  }
  out.x = fourier_synthesis(xc);

  // Equation defect with spectral derivatives (round-off tail filtered).
  const auto xp = spectral_derivative_filtered(grid, out.x);
  const auto xpp = spectral_derivative_filtered(grid, xp);
  double res = 0.0;
  for (int j = 0; j < n; ++j) {
    const double lhs = -delta * xpp[j] + (grid.sin_theta[j] - w) * xp[j];
    res = std::max(res, std::abs(lhs - std::sin(grid.nodes[j] - gvm.psi)));
  }
  out.residual_norm = res;
  if (res > 1e-7) {
    throw std::runtime_error("solve_gci: equation residual " + std::to_string(res) +
                             " above 1e-7");
  }
  if (std::abs(trapezoid_periodic(grid, out.x)) > 1e-10) {
    throw std::runtime_error("solve_gci: zero-mean constraint violated");
  }
  return out;
}

GciProfile solve_gci_fd2(const GvmProfile& gvm, GciForm form) {
  const AngularGrid& grid = gvm.grid;
  const int n = grid.n;
  const double delta = diffusivity_of(gvm, form);
  const double w = gvm.w;
  const double h = grid.weight;

  GciProfile out{gvm.d, w, grid, {}, gvm.psi, 0.0, 0.0};
  out.compat_residual = compat_of(gvm);

  std::vector<double> rhs(n);
  for (int j = 0; j < n; ++j) rhs[j] = std::sin(grid.nodes[j] - gvm.psi);
  // Project onto the complement of the adjoint kernel.
  const double proj = quad_dot(grid, gvm.phi, rhs) / quad_dot(grid, gvm.phi, gvm.phi);
  for (int j = 0; j < n; ++j) rhs[j] -= proj * gvm.phi[j];

  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    const int jm = (j + n - 1) % n;
    const int jp = (j + 1) % n;
    const double s = grid.sin_theta[j] - w;
    a[j][jm] += -delta / (h * h) - s / (2.0 * h);
    a[j][j] += 2.0 * delta / (h * h);
    a[j][jp] += -delta / (h * h) + s / (2.0 * h);
  }
  std::vector<double> b = rhs;
  // Constants span the stencil kernel; the last equation becomes the
  // zero-mean constraint.
  for (int c = 0; c < n; ++c) a[n - 1][c] = h;
  b[n - 1] = 0.0;

  auto acopy = a;
  auto bcopy = b;
  out.x = dense_solve(acopy, bcopy);

  // Residual of the discrete system actually solved (without the swapped row).
  double res = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    const int jm = (j + n - 1) % n;
    const int jp = (j + 1) % n;
    const double s = grid.sin_theta[j] - w;
    const double lhs = (-delta / (h * h) - s / (2.0 * h)) * out.x[jm] +
                       (2.0 * delta / (h * h)) * out.x[j] +
                       (-delta / (h * h) + s / (2.0 * h)) * out.x[jp];
    res = std::max(res, std::abs(lhs - rhs[j]));
  }
  out.residual_norm = res;
  return out;
}

ParityReport gci_parity_check(NoiseParam d, double w, const AngularGrid& grid, GciForm form) {
  const auto [gvm_plus, gvm_minus] = gvm_parity_pair(d, w, grid);
  const auto x_plus = solve_gci(gvm_plus, form);
  const auto x_minus = solve_gci(gvm_minus, form);
  ParityReport rep;
  for (int j = 0; j < grid.n; ++j) {
    const int mj = (grid.n - j) % grid.n;
    rep.max_defect = std::max(rep.max_defect, std::abs(x_minus.x[j] + x_plus.x[mj]));
  }
  rep.pass = rep.max_defect < 1e-8;
  return rep;
}

PerturbationProfiles solve_perturbations(NoiseParam d, const AngularGrid& grid) {
  const int n = grid.n;
  const double dv = d.value();
  const int kmax = n / 2 - 1;
  PerturbationProfiles out{d, grid, {}, {}, 0.0};

  const auto vmf = vmf_profile(d, grid);
  const auto phi0c = fourier_coeffs(vmf.values);

  // Phi_1'' + (1/d)(sin Phi_1)' = (1/d) Phi_0', mode m >= 1 divided by m:
  //   -m phi1_m + (1/(2d))(phi1_{m-1} - phi1_{m+1}) = (i/d) phi0_m,
  // phi1_0 = 0 (zero mean).
  {
    std::vector<std::complex<double>> sub(kmax), diag(kmax), super(kmax), rhs(kmax);
    for (int m = 1; m <= kmax; ++m) {
      sub[m - 1] = 1.0 / (2.0 * dv);
      diag[m - 1] = -static_cast<double>(m);
      super[m - 1] = -1.0 / (2.0 * dv);
      rhs[m - 1] = std::complex<double>(0.0, 1.0 / dv) * phi0c[m];
    }
    const auto chain = tridiag_solve(std::move(sub), std::move(diag), std::move(super),
                                     std::move(rhs));
    std::vector<std::complex<double>> c(n, {0.0, 0.0});
    for (int m = 1; m <= kmax; ++m) {
      c[m] = chain[m - 1];
      c[n - m] = std::conj(chain[m - 1]);
    }
    out.phi1 = fourier_synthesis(c);
  }

  std::vector<double> tmp(n);
  for (int j = 0; j < n; ++j) tmp[j] = out.phi1[j] * grid.sin_theta[j];
  out.beta = trapezoid_periodic(grid, tmp);

  // X_1'' - (1/d) sin X_1' = -X_0'/d + (beta/(d c1)) cos, X_0 = g/d.
  // Mode m >= 1:
  //   -m^2 x1_m - (1/(2d))((m-1)x1_{m-1} - (m+1)x1_{m+1}) = R_m,
  // x1_0 = 0. The m = 0 row is the solvability condition tied to beta.
  const auto g0 = g_profile(d, grid);
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) x0[j] = g0[j] / dv;
  const auto x0p = spectral_derivative(grid, x0);
  const double c1d = c1(d);
  std::vector<double> rhs2(n);
  for (int j = 0; j < n; ++j) {
    rhs2[j] = -x0p[j] / dv + (out.beta / (dv * c1d)) * grid.cos_theta[j];
  }
  const auto rc = fourier_coeffs(rhs2);
  {
    std::vector<std::complex<double>> sub(kmax), diag(kmax), super(kmax), rhs(kmax);
    for (int m = 1; m <= kmax; ++m) {
      sub[m - 1] = -0.5 * (m - 1) / dv;
      diag[m - 1] = -static_cast<double>(m) * m;
      super[m - 1] = 0.5 * (m + 1) / dv;
      rhs[m - 1] = rc[m];
    }
    const auto chain = tridiag_solve(std::move(sub), std::move(diag), std::move(super),
                                     std::move(rhs));
    std::vector<std::complex<double>> c(n, {0.0, 0.0});
    for (int m = 1; m <= kmax; ++m) {
      c[m] = chain[m - 1];
      c[n - m] = std::conj(chain[m - 1]);
    }
    out.x1 = fourier_synthesis(c);
    // Solvability: the m = 0 row demands Re(x1_1)/d = R_0 with R_0 = 0.
    const double solv = std::abs(chain[0].real() / dv - rc[0].real());
    if (solv > 1e-8) {
      throw std::runtime_error("solve_perturbations: X_1 solvability defect " +
                               std::to_string(solv));
    }
  }

  // Structural checks: zero mean and parity.
  if (std::abs(trapezoid_periodic(grid, out.phi1)) > 1e-10 ||
      std::abs(trapezoid_periodic(grid, out.x1)) > 1e-10) {
    throw std::runtime_error("solve_perturbations: zero-mean constraint violated");
  }
  double odd_defect = 0.0, even_defect = 0.0;
  for (int j = 0; j < n; ++j) {
    const int mj = (n - j) % n;
    odd_defect = std::max(odd_defect, std::abs(out.phi1[j] + out.phi1[mj]));
    even_defect = std::max(even_defect, std::abs(out.x1[j] - out.x1[mj]));
  }
  if (odd_defect > 1e-9 || even_defect > 1e-9) {
    throw std::runtime_error("solve_perturbations: parity defect (odd " +
                             std::to_string(odd_defect) + ", even " +
                             std::to_string(even_defect) + ")");
  }
  return out;
}

}  // namespace sohr
