#pragma once

#include <utility>
#include <vector>

#include "sohr/angular.hpp"
#include "sohr/geometry.hpp"
#include "sohr/vmf.hpp"

// Generalized von Mises equilibria: the stationary angle distribution
// Phi_W(theta) of alignment + self-rotation + diffusion on the circle,
//
//   Phi'' - (1/d) * ((W - sin(theta)) * Phi)' = 0,   integral Phi = 1,
//
// together with the derived scalars: order parameter c1_tilde(W), flux tilt
// psi(W), response factor lambda(W), and the first-integral constant C(W).

namespace sohr {

struct GvmProfile {
  NoiseParam d;
  double w = 0.0;
  AngularGrid grid;  // owned copy; profiles stay valid on their own
  std::vector<double> phi;
  double c1_tilde = 0.0;  // |integral Phi (cos, sin)|
  double psi = 0.0;       // atan2 of the flux components, in (-pi, pi]
  double lambda = 0.0;    // (1/(d c1_tilde)) integral sin(theta) sin(theta-psi) Phi
  double c_const = 0.0;   // Phi' - (1/d)(W - sin(theta)) Phi
  double residual_sup = 0.0;  // sup-norm defect of the defining equation
};

// Largest |w| the exponential blocks tolerate for a given d.
inline double gvm_w_guard(double d) { return 700.0 * d / kTwoPi; }

// Solves for Phi_W. The closed form is evaluated in Fourier space: with
// q = exp(-(cos(theta)-1)/d), the one-period integral of the integrating
// factor collapses to a diagonal mode division, which keeps every
// intermediate O(exp(2/d)) and the sampled profile spectrally accurate.
GvmProfile solve_gvm(NoiseParam d, double w, const AngularGrid& grid);

// Profiles at +w and -w; verifies Phi_{-W}(theta_j) = Phi_W(theta_{n-j})
// to 1e-10 and throws if the mirror identity fails.
std::pair<GvmProfile, GvmProfile> gvm_parity_pair(NoiseParam d, double w,
                                                  const AngularGrid& grid);

// Direction omega such that the equilibrium built on it has flux direction
// `Omega`: omega = Omega rotated by -psi.
Vec2 omega_direction(double psi, Vec2 Omega);

}  // namespace sohr
