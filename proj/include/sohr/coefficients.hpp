#pragma once

#include <array>
#include <string>
#include <vector>

#include "sohr/angular.hpp"
#include "sohr/gci.hpp"
#include "sohr/gvm.hpp"

// The six hydrodynamic closure coefficients a_1..a_6(W), their tabulation
// over a symmetric W-grid, the moment functionals m_k[rho_W], and the leading
// small-angular-velocity expansion coefficients.

namespace sohr {

struct AVector {
  double w = 0.0;
  double d = 0.0;
  std::array<double, 6> a{};  // a[k-1] = a_k
};

// Weighted pairings of (Phi_W, X_W):
//   a1 = (1/(lambda d)) I[(sin - W) Phi X]
//   a2 = (1/(lambda d)) I[(sin - W) cos(. - psi) Phi X] - (C/lambda) I[cos(. - psi) X]
//   a3 = (1/(lambda d)) I[(sin - W) sin(. - psi) Phi X] - (C/lambda) I[sin(. - psi) X]
//   a4 = -c1_tilde I[Phi X]
//   a5 = I[sin(. - psi) Phi X]
//   a6 = I[(cos(. - psi) - c1_tilde) Phi X]
AVector compute_avector(const GvmProfile& gvm, const GciProfile& gci);

// Symmetric midpoint W-grid with cached profiles per node.
struct CoefficientRow {
  double w = 0.0;
  std::array<double, 6> a{};
  double c1_tilde = 0.0;
  double psi = 0.0;
  double lambda = 0.0;
};

struct CoefficientTable {
  double d = 0.0;
  double w_max = 0.0;
  int n_w = 0;
  std::vector<CoefficientRow> rows;          // ascending in w
  std::vector<std::vector<double>> phi;      // cached equilibrium per node
  std::vector<std::vector<double>> x;        // cached invariant per node
  int n_theta = 0;

  double dw() const { return 2.0 * w_max / n_w; }
  // Linear interpolation of psi(w); rejects w outside the node range.
  double interp_psi(double w) const;

  struct ParityCheck {
    double even_defect = 0.0;  // a1, a2, a5, c1_tilde, lambda
    double odd_defect = 0.0;   // a3, a4, a6, psi
    bool pass = false;
  };
  ParityCheck parity_check(double tol = 1e-8) const;
};

CoefficientTable build_table(NoiseParam d, double w_max, int n_w, const AngularGrid& grid,
                             bool parallel = true);

// CSV with header `w,a1,...,a6,c1_tilde,psi,lambda`; round-trips bit-exact.
void save_table_csv(const CoefficientTable& table, const std::string& path,
                    const std::string& header_comment = "");
CoefficientTable load_table_csv(const std::string& path);

// Density in W on the table's midpoint grid.
struct WDensity {
  double w_max = 0.0;
  int n_w = 0;
  std::vector<double> values;  // >= 0, one per midpoint

  double dw() const { return 2.0 * w_max / n_w; }
  double mass() const;
  double rho_y() const;  // integral of W * rho_W
  bool is_even(double tol = 1e-12) const;
};

// Gaussian density exp(-w^2/(2 sigma^2)) scaled to the requested mass.
WDensity gaussian_density(double w_max, int n_w, double sigma, double total_mass);

// m_k[rho] = sum_j a_k(w_j) rho_j dw, k = 1..6.
std::array<double, 6> moments(const CoefficientTable& table, const WDensity& rho);

// Leading expansion data at W = 0:
//   a_k(zeta W) = a_k(0) + O(zeta^2) for k in {1,2,5},
//   a_k(zeta W) = a_k^1 zeta W + O(zeta^3) for k in {3,4,6},
// plus the reduced-model coefficients c_k = a_k^1 / a_1(0).
struct SmallZetaCoeffs {
  double a1_0 = 0.0;
  double a3_1 = 0.0;
  double a4_1 = 0.0;
  double a6_1 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c6 = 0.0;
};

SmallZetaCoeffs small_zeta_coeffs(NoiseParam d, const PerturbationProfiles& pert);

}  // namespace sohr
