#pragma once

#include <vector>

#include "sohr/angular.hpp"

// Small-angular-velocity equilibrium machinery: von Mises-Fisher profile,
// order parameter c1(d), the closed-form collision-invariant kernel g(theta),
// the convection constant c2(d) and the pressure constant c5(d).

namespace sohr {

// Dimensionless diffusivity d = D/nu. Supported range [0.05, 20]: small
// enough to avoid overflow of exp(1/d), wide enough for every tabulated case.
class NoiseParam {
 public:
  explicit NoiseParam(double d);
  double value() const { return d_; }

  static constexpr double kMin = 0.05;
  static constexpr double kMax = 20.0;

 private:
  double d_;
};

struct VmfProfile {
  NoiseParam d;
  const AngularGrid* grid = nullptr;
  std::vector<double> values;  // exp(cos(theta)/d) / z_d
  double z_d = 0.0;            // quadrature of exp(cos(theta)/d)
};

VmfProfile vmf_profile(NoiseParam d, const AngularGrid& grid);

// Order parameter c1(d) = I_1(1/d) / I_0(1/d) in (0, 1), strictly decreasing.
double c1(NoiseParam d);

// Odd 2*pi-periodic kernel
//   g(theta) = d*theta - d*pi * int_0^theta exp(-cos s / d) ds
//                        / int_0^pi  exp(-cos s / d) ds,
// cumulative integrals evaluated spectrally on the grid.
std::vector<double> g_profile(NoiseParam d, const AngularGrid& grid);

struct C2Formulations {
  double from_g = 0.0;       // weighted moments of g itself
  double from_h = 0.0;       // via h(cos theta) = g(theta)/sin(theta)
  double from_circle = 0.0;  // full-circle vector form
};

// The three equivalent quadrature routes; they must agree to 1e-9.
C2Formulations c2_formulations(NoiseParam d, const AngularGrid& grid);

// Convection constant c2(d). Computed from the g-route; cross-checked against
// the other two formulations.
double c2(NoiseParam d, const AngularGrid& grid);

// Pressure constant
//   c5 = int exp(cos/d) sin^2 / int exp(cos/d) cos
//      = (I_0(1/d) - I_2(1/d)) / (2 I_1(1/d)).
// Returned from the quadrature route; the Bessel route must agree to 1e-10.
// Not hard-coded to d even though the Bessel recurrence collapses it there.
double c5(NoiseParam d, const AngularGrid& grid);

}  // namespace sohr
