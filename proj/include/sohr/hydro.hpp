#pragma once

#include <utility>
#include <vector>

#include "sohr/coefficients.hpp"

// First-order finite-volume solvers on periodic 1D/2D boxes for the
// rotation-augmented alignment hydrodynamics. The direction field is stored
// as an angle per cell, so |Omega| = 1 holds identically. Scalar transport is
// conservative local Lax-Friedrichs (mass telescopes exactly); the
// non-conservative angle equation uses sign-upwinded advection plus the same
// Lax-Friedrichs dissipation, which the pressure coupling needs for
// von Neumann stability; sources are forward Euler inside the split step.

namespace sohr {

struct HydroGrid {
  int nx = 0, ny = 1;
  double lx = 1.0, ly = 1.0;
  double dx() const { return lx / nx; }
  double dy() const { return ly / ny; }
  int cells() const { return nx * ny; }
  int idx(int ix, int iy) const { return iy * nx + ix; }
};

// Density / angular-momentum / direction state with slow-rotation closure
// constants. The same container drives the plain backbone model (y ignored)
// and the expanded small-rotation model.
struct HydroStateS {
  HydroGrid grid;
  std::vector<double> rho;
  std::vector<double> rho_y;
  std::vector<double> phi;
  double c1 = 0.0, c2 = 0.0, d = 0.0;
};

// rho transported by c1 rho Omega, rho Y alongside, and
//   phi_t + c2 (Omega.grad) phi + (d/rho)(Omega_perp.grad) rho - Y = 0.
void step_sohr_s(HydroStateS& s, double dt);

// Same scheme with the rotation source and rho_y frozen out; with Y = 0 the
// two updates are bitwise identical.
void step_soh(HydroStateS& s, double dt);

// Per-bin density in W with the shared direction field; closure data comes
// from the coefficient table (moments recomputed per cell per sweep).
struct HydroStateL {
  HydroGrid grid;
  int n_w = 0;
  double w_max = 0.0;
  std::vector<double> rho_w;  // [cell * n_w + bin]
  std::vector<double> phi;
  const CoefficientTable* table = nullptr;

  double* cell_bins(int cell) { return rho_w.data() + static_cast<size_t>(cell) * n_w; }
  const double* cell_bins(int cell) const {
    return rho_w.data() + static_cast<size_t>(cell) * n_w;
  }
};

void step_sohr_l(HydroStateL& s, double dt);

struct ReducedCoeffs {
  double c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0;
};

// Backbone model with the c5 pressure constant plus the first-order
// self-rotation corrections:
//   phi_t + c2 (Omega.grad) phi + (c5/rho)(Omega_perp.grad) rho
//     + zeta Y (c3 + c4)(Omega_perp.grad) phi + zeta (c6/rho)(Omega.grad)(rho Y) = 0.
// zeta = 0 reduces to the plain backbone with pressure constant c5.
void step_reduced(HydroStateS& s, double zeta, const ReducedCoeffs& rc, double dt);

// gamma_-/gamma_+ = ((c1+c2) cos t -/+ sqrt((c2-c1)^2 cos^2 t + 4 d sin^2 t))/2.
std::pair<double, double> soh_eigenvalues(double c1, double c2, double d, double theta);

// Total mass (cell sum times cell area); per-bin version for the W-resolved
// state.
double total_mass(const HydroStateS& s);
std::vector<double> bin_masses(const HydroStateL& s);

// 2D snapshots: flat little-endian binary (rho, rho_y, phi blocks of
// nx*ny doubles) plus a CSV sidecar <path>.csv with the grid and closure
// parameters. Round-trips exactly.
void save_state_2d(const HydroStateS& s, const std::string& path,
                   const std::string& header_comment = "");
HydroStateS load_state_2d(const std::string& path);

}  // namespace sohr
