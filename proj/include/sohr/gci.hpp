#pragma once

#include <vector>

#include "sohr/angular.hpp"
#include "sohr/gvm.hpp"
#include "sohr/vmf.hpp"

// Generalized collision invariants: the zero-mean periodic solution of
//
//   -d X'' + (sin(theta) - W) X' = sin(theta - psi(W)),
//
// solvable because the right-hand side is orthogonal to the adjoint kernel
// Phi_W (which is exactly how psi is constructed). At W = 0 this scaling
// gives X_0 = g/d. The `unit` form drops the diffusivity from the second
// derivative; every model output downstream is homogeneous of degree one in
// X, so the choice cannot change the hydrodynamics.

namespace sohr {

enum class GciForm {
  scaled,  // -d X'' + (sin - W) X' = sin(theta - psi)
  unit,    // -   X'' + (sin - W) X' = sin(theta - psi)
};

struct GciProfile {
  NoiseParam d;
  double w = 0.0;
  AngularGrid grid;  // owned copy; profiles stay valid on their own
  std::vector<double> x;
  double psi_used = 0.0;
  double residual_norm = 0.0;    // sup-norm equation defect, spectral derivatives
  double compat_residual = 0.0;  // |quadrature(Phi * sin(theta - psi))|
};

// Spectral integrating-factor solve on the profile's grid.
GciProfile solve_gci(const GvmProfile& gvm, GciForm form = GciForm::scaled);

// Second-order central-difference discretization of the same problem:
// cyclic tridiagonal system, right-hand side projected against Phi_W, the
// rank-one kernel (constants) removed by swapping the zero-mean constraint
// into the last row. Dense LU; used as the convergence-order cross check.
GciProfile solve_gci_fd2(const GvmProfile& gvm, GciForm form = GciForm::scaled);

struct ParityReport {
  double max_defect = 0.0;
  bool pass = false;
};

// Checks X_{-W}(theta_j) = -X_W(theta_{n-j}); pass iff defect < 1e-8.
ParityReport gci_parity_check(NoiseParam d, double w, const AngularGrid& grid,
                              GciForm form = GciForm::scaled);

// First-order response of the pair (Phi, X) to a small angular velocity:
//   Phi_{zeta W} = Phi_0 + zeta*W*Phi_1 + O(zeta^2)   (Phi_1 odd)
//   X_{zeta W}   = X_0   + zeta*W*X_1   + O(zeta^2)   (X_1 even)
// with beta = integral Phi_1 sin(theta).
struct PerturbationProfiles {
  NoiseParam d;
  AngularGrid grid;  // owned copy; profiles stay valid on their own
  std::vector<double> phi1;
  std::vector<double> x1;
  double beta = 0.0;
};

PerturbationProfiles solve_perturbations(NoiseParam d, const AngularGrid& grid);

}  // namespace sohr
