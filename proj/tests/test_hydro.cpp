#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "sohr/geometry.hpp"
#include "sohr/hydro.hpp"

using namespace sohr;

namespace {

HydroStateS uniform_state(int nx, double rho0, double y0, double phi0, double c1v, double c2v,
                          double dv, double lx = kTwoPi) {
  HydroStateS s;
  s.grid = HydroGrid{nx, 1, lx, 1.0};
  s.c1 = c1v;
  s.c2 = c2v;
  s.d = dv;
  s.rho.assign(nx, rho0);
  s.rho_y.assign(nx, rho0 * y0);
  s.phi.assign(nx, phi0);
  return s;
}

}  // namespace

TEST_CASE("eigenvalue formula special cases") {
  {
    const auto [lo, hi] = soh_eigenvalues(0.4, 0.9, 1.0, 0.0);
    CHECK(lo == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(hi == doctest::Approx(0.9).epsilon(1e-14));
  }
  {
    const auto [lo, hi] = soh_eigenvalues(0.4, 0.9, 0.7, kTwoPi / 4.0);
    CHECK(lo == doctest::Approx(-std::sqrt(0.7)).epsilon(1e-14));
    CHECK(hi == doctest::Approx(std::sqrt(0.7)).epsilon(1e-14));
  }
  {
    const double c = 0.5, theta = 0.3, d = 0.9;
    const auto [lo, hi] = soh_eigenvalues(c, c, d, theta);
    const double mean = c * std::cos(theta);
    const double rad = std::sqrt(d) * std::abs(std::sin(theta));
    CHECK(lo == doctest::Approx(mean - rad).epsilon(1e-14));
    CHECK(hi == doctest::Approx(mean + rad).epsilon(1e-14));
  }
  CHECK_THROWS_AS(soh_eigenvalues(0.4, 0.9, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("uniform states are fixed points; uniform rotation integrates exactly") {
  auto s = uniform_state(64, 1.3, 0.0, 0.4, 0.45, 0.19, 1.0);
  const auto before = s;
  for (int q = 0; q < 50; ++q) step_sohr_s(s, 1e-3);
  for (int i = 0; i < 64; ++i) {
    CHECK(s.rho[i] == before.rho[i]);
    CHECK(s.phi[i] == before.phi[i]);
  }

  auto r = uniform_state(64, 1.0, 0.25, 0.1, 0.45, 0.19, 1.0);
  for (int q = 0; q < 200; ++q) step_sohr_s(r, 1e-3);
  for (int i = 0; i < 64; ++i) {
    CHECK(r.rho[i] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(wrap_pm_pi(r.phi[i] - (0.1 + 0.25 * 0.2)) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("zero angular momentum reduces to the backbone model bitwise") {
  auto a = uniform_state(128, 1.0, 0.0, 0.0, 0.45, 0.19, 1.0);
  for (int i = 0; i < 128; ++i) {
    const double x = a.grid.dx() * i;
    a.rho[i] = 1.0 + 0.2 * std::cos(x);
    a.phi[i] = 0.3 * std::sin(x);
  }
  auto b = a;
  for (int q = 0; q < 100; ++q) {
    step_sohr_s(a, 1e-3);
    step_soh(b, 1e-3);
  }
  for (int i = 0; i < 128; ++i) {
    CHECK(a.rho[i] == b.rho[i]);
    CHECK(a.phi[i] == b.phi[i]);
    CHECK(a.rho_y[i] == 0.0);
  }
}

TEST_CASE("mass and angular momentum are conserved to roundoff") {
  auto s = uniform_state(256, 1.0, 0.0, 0.0, 0.45, 0.19, 1.0);
  for (int i = 0; i < 256; ++i) {
    const double x = s.grid.dx() * i;
    s.rho[i] = 1.0 + 0.3 * std::cos(x) + 0.1 * std::sin(2 * x);
    s.rho_y[i] = 0.2 * std::sin(x);
    s.phi[i] = 0.4 * std::cos(x);
  }
  const double mass0 = total_mass(s);
  double my0 = 0.0;
  for (double v : s.rho_y) my0 += v;
  for (int q = 0; q < 1000; ++q) step_sohr_s(s, 1e-3);
  const double mass1 = total_mass(s);
  double my1 = 0.0;
  for (double v : s.rho_y) my1 += v;
  CHECK(std::abs(mass1 - mass0) / mass0 < 1e-12);
  CHECK(std::abs(my1 - my0) < 1e-12 * std::abs(my0) + 1e-12);
}

TEST_CASE("angular momentum advects at the mass flux speed") {
  const int nx = 512;
  auto s = uniform_state(nx, 1.0, 0.0, 0.0, 0.45, 0.19, 1.0);
  // Small amplitude keeps the rotation source from steering the flow, so the
  // blob rides along passively.
  for (int i = 0; i < nx; ++i) {
    const double x = s.grid.dx() * i;
    s.rho_y[i] = 1e-3 * std::exp(std::cos(x - 1.0) * 4.0);
  }
  // Circular centroid via the first Fourier phase.
  auto centroid = [&](const std::vector<double>& f) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double x = s.grid.dx() * i;
      re += f[i] * std::cos(x);
      im += f[i] * std::sin(x);
    }
    return std::atan2(im, re);
  };
  const double x0 = centroid(s.rho_y);
  const double t_end = 4.0;
  const double dt = 2e-3;
  const int steps = static_cast<int>(t_end / dt);
  for (int q = 0; q < steps; ++q) step_sohr_s(s, dt);
  const double moved = wrap_pm_pi(centroid(s.rho_y) - x0);
  CHECK(moved == doctest::Approx(s.c1 * t_end).epsilon(0.03));
}

TEST_CASE("CFL violations are rejected") {
  auto s = uniform_state(64, 1.0, 0.0, 0.0, 0.45, 0.19, 1.0);
  CHECK_THROWS_AS(step_sohr_s(s, 1.0), std::invalid_argument);
}

TEST_CASE("vacuum cells abort the step") {
  auto s = uniform_state(64, 1.0, 0.0, 0.0, 0.45, 0.19, 1.0);
  s.rho[3] = 0.0;
  CHECK_THROWS_AS(step_sohr_s(s, 1e-3), std::runtime_error);
}

TEST_CASE("2D uniform fixed point and conservation") {
  HydroStateS s;
  s.grid = HydroGrid{32, 32, kTwoPi, kTwoPi};
  s.c1 = 0.45;
  s.c2 = 0.19;
  s.d = 1.0;
  s.rho.assign(32 * 32, 0.7);
  s.rho_y.assign(32 * 32, 0.0);
  s.phi.assign(32 * 32, 1.1);
  auto before = s;
  for (int q = 0; q < 20; ++q) step_sohr_s(s, 1e-3);
  for (int c = 0; c < 32 * 32; ++c) {
    CHECK(s.rho[c] == before.rho[c]);
    CHECK(s.phi[c] == before.phi[c]);
  }
  for (int c = 0; c < 32 * 32; ++c) {
    const int ix = c % 32, iy = c / 32;
    s.rho[c] = 1.0 + 0.3 * std::cos(ix * kTwoPi / 32) * std::sin(iy * kTwoPi / 32);
    s.phi[c] = 0.2 * std::sin(ix * kTwoPi / 32);
  }
  const double m0 = total_mass(s);
  for (int q = 0; q < 200; ++q) step_sohr_s(s, 1e-3);
  CHECK(std::abs(total_mass(s) - m0) / m0 < 1e-12);
}

namespace {

struct LSetup {
  AngularGrid grid = periodic_grid(512);
  CoefficientTable table;

  LSetup() { table = build_table(NoiseParam(1.0), 10.0, 64, grid); }
};

const LSetup& lsetup() {
  static LSetup s;
  return s;
}

HydroStateL uniform_l(const CoefficientTable& table, int nx, const WDensity& rho,
                      double phi0) {
  HydroStateL s;
  s.grid = HydroGrid{nx, 1, kTwoPi, 1.0};
  s.n_w = table.n_w;
  s.w_max = table.w_max;
  s.table = &table;
  s.phi.assign(nx, phi0);
  s.rho_w.resize(static_cast<size_t>(nx) * table.n_w);
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < table.n_w; ++k) {
      s.rho_w[static_cast<size_t>(i) * table.n_w + k] = rho.values[k];
    }
  }
  return s;
}

}  // namespace

TEST_CASE("uniform W-resolved states are fixed points, even or not") {
  const auto& ls = lsetup();
  {
    auto s = uniform_l(ls.table, 64, gaussian_density(10.0, 64, 1.0, 1.0), 0.8);
    const auto before = s;
    for (int q = 0; q < 20; ++q) step_sohr_l(s, 1e-3);
    for (size_t i = 0; i < s.rho_w.size(); ++i) CHECK(s.rho_w[i] == before.rho_w[i]);
    for (int i = 0; i < 64; ++i) CHECK(s.phi[i] == before.phi[i]);
  }
  {
    // Skewed density: self-rotation is fully compensated in homogeneous
    // states, so this too is a fixed point.
    WDensity skew = gaussian_density(10.0, 64, 1.0, 1.0);
    for (int k = 0; k < 64; ++k) {
      const double w = (k + 0.5 - 32.0) * skew.dw();
      skew.values[k] *= std::exp(0.4 * w);
    }
    auto s = uniform_l(ls.table, 64, skew, 0.8);
    const auto before = s;
    for (int q = 0; q < 20; ++q) step_sohr_l(s, 1e-3);
    for (size_t i = 0; i < s.rho_w.size(); ++i) CHECK(s.rho_w[i] == before.rho_w[i]);
    for (int i = 0; i < 64; ++i) CHECK(s.phi[i] == before.phi[i]);
  }
}

TEST_CASE("per-bin mass conservation") {
  const auto& ls = lsetup();
  auto s = uniform_l(ls.table, 128, gaussian_density(10.0, 64, 1.0, 1.0), 0.0);
  for (int i = 0; i < 128; ++i) {
    const double x = s.grid.dx() * i;
    s.phi[i] = 0.3 * std::sin(x);
    for (int k = 0; k < 64; ++k) {
      s.rho_w[static_cast<size_t>(i) * 64 + k] *= 1.0 + 0.2 * std::cos(x);
    }
  }
  const auto m0 = bin_masses(s);
  for (int q = 0; q < 500; ++q) step_sohr_l(s, 1e-3);
  const auto m1 = bin_masses(s);
  for (int k = 0; k < 64; ++k) {
    CHECK(std::abs(m1[k] - m0[k]) <= 1e-12 * std::max(1e-30, m0[k]) + 1e-300);
  }
}

TEST_CASE("W-resolved stepper rejects missing positivity") {
  const auto& ls = lsetup();
  auto s = uniform_l(ls.table, 32, gaussian_density(10.0, 64, 1.0, 1.0), 0.0);
  s.rho_w[5] = -1.0;
  CHECK_THROWS_AS(step_sohr_l(s, 1e-4), std::runtime_error);

  // Zero-mass cells have m1 = 0 and cannot drive the direction equation.
  auto z = uniform_l(ls.table, 32, gaussian_density(10.0, 64, 1.0, 1.0), 0.0);
  for (int k = 0; k < 64; ++k) z.rho_w[k] = 0.0;
  CHECK_THROWS_AS(step_sohr_l(z, 1e-4), std::runtime_error);

  auto c = uniform_l(ls.table, 32, gaussian_density(10.0, 64, 1.0, 1.0), 0.0);
  CHECK_THROWS_AS(step_sohr_l(c, 10.0), std::invalid_argument);  // CFL
}

TEST_CASE("reduced stepper: zeta = 0 ignores the correction coefficients") {
  auto a = uniform_state(128, 1.0, 0.3, 0.0, 0.45, 0.19, 1.0);
  for (int i = 0; i < 128; ++i) {
    const double x = a.grid.dx() * i;
    a.rho[i] = 1.0 + 0.1 * std::cos(x);
    a.rho_y[i] = 0.3 * a.rho[i];
    a.phi[i] = 0.2 * std::sin(x);
  }
  auto b = a;
  ReducedCoeffs rc1{0.19, 0.5, -0.7, 1.0, 0.9};
  ReducedCoeffs rc2{0.19, -3.0, 2.0, 1.0, -5.0};
  step_reduced(a, 0.0, rc1, 1e-3);
  step_reduced(b, 0.0, rc2, 1e-3);
  for (int i = 0; i < 128; ++i) {
    CHECK(a.rho[i] == b.rho[i]);
    CHECK(a.phi[i] == b.phi[i]);
  }
}

TEST_CASE("reduced stepper: uniform states are fixed points for any zeta") {
  auto s = uniform_state(64, 1.0, 0.4, 0.9, 0.45, 0.19, 1.0);
  ReducedCoeffs rc{0.19, 0.5, -0.7, 1.0, 0.9};
  const auto before = s;
  for (int q = 0; q < 50; ++q) step_reduced(s, 0.3, rc, 1e-3);
  for (int i = 0; i < 64; ++i) {
    CHECK(s.rho[i] == before.rho[i]);
    CHECK(s.phi[i] == before.phi[i]);
  }
}

TEST_CASE("2D snapshot round-trip") {
  HydroStateS s;
  s.grid = HydroGrid{8, 4, 2.0, 1.0};
  s.c1 = 0.45;
  s.c2 = 0.19;
  s.d = 1.0;
  s.rho.resize(32);
  s.rho_y.resize(32);
  s.phi.resize(32);
  for (int c = 0; c < 32; ++c) {
    s.rho[c] = 1.0 + 0.01 * c;
    s.rho_y[c] = 0.2 - 0.003 * c;
    s.phi[c] = wrap_angle(0.1 * c);
  }
  const auto path =
      (std::filesystem::temp_directory_path() / "sohr_state2d.bin").string();
  save_state_2d(s, path, "round-trip");
  const auto loaded = load_state_2d(path);
  CHECK(loaded.grid.nx == s.grid.nx);
  CHECK(loaded.grid.ny == s.grid.ny);
  CHECK(loaded.grid.lx == s.grid.lx);
  CHECK(loaded.c1 == s.c1);
  CHECK(loaded.c2 == s.c2);
  CHECK(loaded.d == s.d);
  for (int c = 0; c < 32; ++c) {
    CHECK(loaded.rho[c] == s.rho[c]);
    CHECK(loaded.rho_y[c] == s.rho_y[c]);
    CHECK(loaded.phi[c] == s.phi[c]);
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".csv");
}

TEST_CASE("one step of the W-resolved model matches the reduced model to O(zeta^2)") {
  // Fine symmetric W-grid so a zeta-narrow density is resolved.
  const auto grid = periodic_grid(256);
  NoiseParam d(1.0);
  const auto table = build_table(d, 2.0, 512, grid);
  const auto pert = solve_perturbations(d, grid);
  const auto sz = small_zeta_coeffs(d, pert);
  const double c1v = c1(d);
  const double c2v = c2(d, grid);
  const double c5v = c5(d, grid);

  const int nx = 128;
  const double dt = 2e-3;
  std::vector<double> sups;
  for (double zeta : {0.1, 0.05, 0.025}) {
    // Base density in the reference variable u = w / zeta: skewed Gaussian.
    WDensity rho_l{2.0, 512, std::vector<double>(512)};
    const double dw = rho_l.dw();
    double base_mass = 0.0, base_momentum = 0.0;
    for (int k = 0; k < 512; ++k) {
      const double w = (k + 0.5 - 256.0) * dw;
      const double u = w / zeta;
      const double f = std::exp(-0.5 * u * u) * (1.0 + 0.6 * std::tanh(u));
      rho_l.values[k] = f / zeta;
      base_mass += f / zeta * dw;
      base_momentum += u * f / zeta * dw;  // integral of u * f(u) du
    }
    const double y_base = base_momentum / base_mass;

    HydroStateL sl = uniform_l(table, nx, rho_l, 0.0);
    HydroStateS sr;
    sr.grid = sl.grid;
    sr.c1 = c1v;
    sr.c2 = c2v;
    sr.d = 1.0;
    sr.rho.resize(nx);
    sr.rho_y.resize(nx);
    sr.phi.resize(nx);
    for (int i = 0; i < nx; ++i) {
      const double x = sl.grid.dx() * i;
      const double mod = 1.0 + 0.1 * std::cos(x);
      sl.phi[i] = 0.2 * std::sin(x);
      for (int k = 0; k < 512; ++k) {
        sl.rho_w[static_cast<size_t>(i) * 512 + k] = rho_l.values[k] * mod;
      }
      sr.phi[i] = sl.phi[i];
      sr.rho[i] = base_mass * mod;
      sr.rho_y[i] = base_mass * mod * y_base;
    }
    ReducedCoeffs rc{c2v, sz.c3, sz.c4, c5v, sz.c6};
    step_sohr_l(sl, dt);
    step_reduced(sr, zeta, rc, dt);
    double sup = 0.0;
    for (int i = 0; i < nx; ++i) {
      sup = std::max(sup, std::abs(wrap_pm_pi(sl.phi[i] - sr.phi[i])));
      double rho_tot = 0.0;
      for (int k = 0; k < 512; ++k) rho_tot += sl.rho_w[static_cast<size_t>(i) * 512 + k];
      rho_tot *= rho_l.dw();
      sup = std::max(sup, std::abs(rho_tot - sr.rho[i]) / base_mass);
    }
    sups.push_back(sup);
  }
  CHECK(sups[0] / sups[1] == doctest::Approx(4.0).epsilon(0.3));
  CHECK(sups[1] / sups[2] == doctest::Approx(4.0).epsilon(0.3));
}
