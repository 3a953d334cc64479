#pragma once

#include <complex>
#include <vector>

#include "sohr/coefficients.hpp"

// Linearized plane-wave analysis of the moment-closed velocity system about
// a uniform state (rho0_W, Omega0). A perturbation ~ exp(i(x xi - mu t)) with
// propagation angle theta against Omega0 admits nontrivial amplitudes iff
//
//   -mu m1 + m2 xi cos(theta) - (m3 + m4) xi sin(theta)
//     - m5[B] xi^2 sin^2(theta) + m6[B] xi^2 cos(theta) sin(theta) = 0,
//
// where B(W) = c1t(W) rho0_W / (-mu + c1t(W) xi cos(theta)). For even rho0_W
// the odd-coefficient moments vanish and every non-resonant root is real.

namespace sohr {

struct DispersionProblem {
  const CoefficientTable* table = nullptr;
  WDensity rho0;
  double xi = 0.0;
  double theta = 0.0;

  // Minimum distance of a real trial mu to the transport poles
  // c1t(w_j) xi cos(theta) before the bracket integral loses meaning.
  double resonance_eps = 1e-6;
};

std::complex<double> dispersion_eval(const DispersionProblem& p, std::complex<double> mu);

struct DispersionRoot {
  std::complex<double> mu;
  double residual = 0.0;
  bool resonant = false;  // real part inside the transport-pole range
};

// Deterministic Muller iteration from closed-form seeds plus a coarse
// real-axis scan; deduplicated at 1e-8, residual tolerance 1e-9 * scale.
std::vector<DispersionRoot> find_roots(const DispersionProblem& p);

struct StabilityScanRow {
  double xi = 0.0;
  double theta = 0.0;
  std::complex<double> mu;
  double residual = 0.0;
  bool resonant = false;
};

struct StabilityScanReport {
  std::vector<StabilityScanRow> rows;
  double max_im_abs = 0.0;  // over non-resonant roots
  bool pass = false;        // max_im_abs < 1e-7
};

// Runs find_roots over the (xi, theta) product grid. rho0 must be even.
StabilityScanReport stability_scan(const CoefficientTable& table, const WDensity& rho0,
                                   const std::vector<double>& xi_grid,
                                   const std::vector<double>& theta_grid);

}  // namespace sohr
