#include "sohr/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <sstream>
#include <thread>

#include "sohr/coefficients.hpp"
#include "sohr/dispersion.hpp"
#include "sohr/gci.hpp"
#include "sohr/gvm.hpp"
#include "sohr/hydro.hpp"
#include "sohr/ibm.hpp"
#include "sohr/vmf.hpp"

namespace sohr {

namespace {

using cplx = std::complex<double>;

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAIL[" << what << "] ";
    }
  }
  CriterionResult result(const std::string& summary) {
    CriterionResult r;
    r.pass = pass;
    r.detail = detail.str().empty() ? summary : detail.str() + "| " + summary;
    return r;
  }
};

// Mode-1 complex amplitude (2/nx) sum f_j exp(-i 2 pi j / nx) of a 1D field.
cplx mode1(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  cplx acc(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    const double a = kTwoPi * j / n;
    acc += f[j] * cplx(std::cos(a), -std::sin(a));
  }
  return acc * (2.0 / n);
}

// Least-squares slope of the unwrapped phase of a(t); returns d(arg)/dt.
double phase_slope(const std::vector<double>& t, const std::vector<cplx>& a) {
  const int n = static_cast<int>(t.size());
  std::vector<double> ph(n);
  ph[0] = std::arg(a[0]);
  for (int i = 1; i < n; ++i) {
    ph[i] = ph[i - 1] + wrap_pm_pi(std::arg(a[i]) - std::arg(a[i - 1]));
  }
  double st = 0, sp = 0, stt = 0, stp = 0;
  for (int i = 0; i < n; ++i) {
    st += t[i];
    sp += ph[i];
    stt += t[i] * t[i];
    stp += t[i] * ph[i];
  }
  return (n * stp - st * sp) / (n * stt - st * st);
}

int resolve_threads(const AcceptanceOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---- criterion 1: closed-form equilibrium at W = 0 -------------------------

CriterionResult crit_equilibrium() {
  const auto grid = periodic_grid(512);
  Check c;
  double worst = 0.0;
  for (double dv : {0.2, 1.0, 5.0}) {
    NoiseParam d(dv);
    const auto gvm = solve_gvm(d, 0.0, grid);
    const double z = kTwoPi * bessel_i(0, 1.0 / dv);
    double sup = 0.0;
    for (int j = 0; j < grid.n; ++j) {
      sup = std::max(sup, std::abs(gvm.phi[j] - std::exp(grid.cos_theta[j] / dv) / z));
    }
    worst = std::max(worst, sup);
    c.expect(sup <= 1e-10, fmt("d=%g sup=%.3e", dv, sup));
  }
  return c.result(fmt("sup|Phi_0 - VMF| = %.3e (tol 1e-10)", worst));
}

// ---- criterion 2: GCI oracle at W = 0 and stencil convergence --------------

CriterionResult crit_gci_oracle() {
  Check c;
  const auto grid = periodic_grid(512);
  double worst = 0.0;
  for (double dv : {0.2, 1.0, 5.0}) {
    NoiseParam d(dv);
    const auto gvm = solve_gvm(d, 0.0, grid);
    const auto gci = solve_gci(gvm);
    const auto g = g_profile(d, grid);
    double sup = 0.0;
    for (int j = 0; j < grid.n; ++j) sup = std::max(sup, std::abs(gci.x[j] - g[j] / dv));
    worst = std::max(worst, sup);
    c.expect(sup <= 1e-7, fmt("d=%g sup=%.3e", dv, sup));
  }
  // Convergence of the second-order stencil toward the spectral solution.
  std::vector<double> errs;
  for (int n : {128, 256, 512}) {
    const auto gr = periodic_grid(n);
    const auto gvm = solve_gvm(NoiseParam(1.0), 0.0, gr);
    const auto spectral = solve_gci(gvm);
    const auto fd = solve_gci_fd2(gvm);
    double sup = 0.0;
    for (int j = 0; j < n; ++j) sup = std::max(sup, std::abs(spectral.x[j] - fd.x[j]));
    errs.push_back(sup);
  }
  const double r1 = errs[0] / errs[1];
  const double r2 = errs[1] / errs[2];
  c.expect(r1 > 3.2 && r1 < 4.8, fmt("fd2 ratio128/256=%.2f", r1));
  c.expect(r2 > 3.2 && r2 < 4.8, fmt("fd2 ratio256/512=%.2f", r2));
  return c.result(fmt("sup|X_0 - g/d| = %.3e (tol 1e-7); fd2 ratios %.2f, %.2f", worst, r1, r2));
}

// ---- criterion 3: parity suite ---------------------------------------------

CriterionResult crit_parity() {
  Check c;
  const auto grid = periodic_grid(512);
  double worst = 0.0;
  for (double dv : {0.2, 1.0, 5.0}) {
    NoiseParam d(dv);
    for (double w : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      const auto [gp, gm] = gvm_parity_pair(d, w, grid);
      const auto xp = solve_gci(gp);
      const auto xm = solve_gci(gm);
      const auto ap = compute_avector(gp, xp);
      const auto am = compute_avector(gm, xm);
      double defect = 0.0;
      defect = std::max(defect, std::abs(gp.c1_tilde - gm.c1_tilde));
      defect = std::max(defect, std::abs(gp.lambda - gm.lambda));
      defect = std::max(defect, std::abs(gp.psi + gm.psi));
      defect = std::max(defect, std::abs(gp.c_const + gm.c_const));
      for (int k : {0, 1, 4}) defect = std::max(defect, std::abs(ap.a[k] - am.a[k]));
      for (int k : {2, 3, 5}) defect = std::max(defect, std::abs(ap.a[k] + am.a[k]));
      worst = std::max(worst, defect);
      c.expect(defect <= 1e-8, fmt("d=%g w=%g defect=%.3e", dv, w, defect));
    }
    const auto g0 = solve_gvm(d, 0.0, grid);
    const auto x0 = solve_gci(g0);
    const auto a0 = compute_avector(g0, x0);
    for (int k : {2, 3, 5}) {
      c.expect(std::abs(a0.a[k]) <= 1e-10, fmt("d=%g a%d(0)=%.3e", dv, k + 1, a0.a[k]));
    }
  }
  return c.result(fmt("max parity defect = %.3e (tol 1e-8)", worst));
}

// ---- criterion 4: positivity of a1, a5 --------------------------------------

CriterionResult crit_positivity() {
  Check c;
  const auto grid = periodic_grid(512);
  double min_a1 = 1e300, min_a5 = 1e300;
  for (double dv : {0.2, 1.0, 5.0}) {
    const auto table = build_table(NoiseParam(dv), 10.0, 64, grid);
    for (const auto& r : table.rows) {
      min_a1 = std::min(min_a1, r.a[0]);
      min_a5 = std::min(min_a5, r.a[4]);
      c.expect(r.a[0] > 0.0 && r.a[4] > 0.0, fmt("d=%g w=%g a1=%.3e a5=%.3e", dv, r.w,
                                                 r.a[0], r.a[4]));
    }
  }
  return c.result(fmt("min a1 = %.3e, min a5 = %.3e over |w|<=10", min_a1, min_a5));
}

// ---- criterion 5: identities at W = 0 ---------------------------------------

CriterionResult crit_identities() {
  Check c;
  const auto grid = periodic_grid(512);
  std::ostringstream note;
  for (double dv : {0.2, 1.0, 5.0}) {
    NoiseParam d(dv);
    const auto gvm = solve_gvm(d, 0.0, grid);
    const auto gci = solve_gci(gvm);
    const auto av = compute_avector(gvm, gci);
    const double id1 = std::abs(av.a[4] - dv * gvm.lambda * av.a[0]);
    const double id2 = std::abs(av.a[1] / av.a[0] - c2(d, grid));
    const double id3 = std::abs(gvm.lambda - 1.0);
    const double id4 = std::abs(c5(d, grid) - dv);
    c.expect(id1 <= 1e-9, fmt("d=%g |a5-d*lam*a1|=%.3e", dv, id1));
    c.expect(id2 <= 1e-8, fmt("d=%g |a2/a1-c2|=%.3e", dv, id2));
    c.expect(id3 <= 1e-10, fmt("d=%g |lambda(0)-1|=%.3e", dv, id3));
    c.expect(id4 <= 1e-10, fmt("d=%g |c5-d|=%.3e", dv, id4));
    note << fmt("d=%g: a5-d*lam*a1=%.1e a2/a1-c2=%.1e lam-1=%.1e c5-d=%.1e; ", dv, id1, id2,
                id3, id4);
  }
  return c.result(note.str());
}

// ---- criterion 6: small-zeta rates ------------------------------------------

CriterionResult crit_small_zeta() {
  Check c;
  const auto grid = periodic_grid(512);
  NoiseParam d(1.0);
  const auto pert = solve_perturbations(d, grid);
  const auto sz = small_zeta_coeffs(d, pert);
  const auto gvm0 = solve_gvm(d, 0.0, grid);
  const auto gci0 = solve_gci(gvm0);
  const auto a0 = compute_avector(gvm0, gci0);

  const double zetas[3] = {0.2, 0.1, 0.05};
  double even_diff[3][3];  // [zeta][k in {1,2,5}]
  double odd_err[3][3];    // [zeta][k in {3,4,6}]
  const double slope_ref[3] = {sz.a3_1, sz.a4_1, sz.a6_1};
  for (int i = 0; i < 3; ++i) {
    const auto gvm = solve_gvm(d, zetas[i], grid);
    const auto gci = solve_gci(gvm);
    const auto av = compute_avector(gvm, gci);
    const int even_k[3] = {0, 1, 4};
    const int odd_k[3] = {2, 3, 5};
    for (int q = 0; q < 3; ++q) {
      even_diff[i][q] = std::abs(av.a[even_k[q]] - a0.a[even_k[q]]);
      odd_err[i][q] = std::abs(av.a[odd_k[q]] / zetas[i] - slope_ref[q]);
    }
  }
  std::ostringstream note;
  for (int q = 0; q < 3; ++q) {
    const double r1 = even_diff[0][q] / even_diff[1][q];
    const double r2 = even_diff[1][q] / even_diff[2][q];
    c.expect(r1 > 3.2 && r1 < 4.8, fmt("even k#%d ratio %.2f", q, r1));
    c.expect(r2 > 3.2 && r2 < 4.8, fmt("even k#%d ratio %.2f", q, r2));
    note << fmt("even#%d %.2f/%.2f ", q, r1, r2);
  }
  for (int q = 0; q < 3; ++q) {
    // O(zeta^2) decay bound; robust to error sign crossings.
    const double floor = 1e-9 * std::abs(slope_ref[q]) + 1e-12;
    c.expect(odd_err[1][q] <= std::max(odd_err[0][q] / 2.0, floor),
             fmt("odd k#%d err(0.1)=%.2e vs err(0.2)=%.2e", q, odd_err[1][q], odd_err[0][q]));
    c.expect(odd_err[2][q] <= std::max(odd_err[0][q] / 8.0, floor),
             fmt("odd k#%d err(0.05)=%.2e vs err(0.2)=%.2e", q, odd_err[2][q], odd_err[0][q]));
    note << fmt("odd#%d %.1e->%.1e->%.1e ", q, odd_err[0][q], odd_err[1][q], odd_err[2][q]);
  }
  return c.result(note.str());
}

// ---- criterion 7: dispersion realness and closed forms -----------------------

CriterionResult crit_dispersion() {
  Check c;
  const auto grid = periodic_grid(512);
  const std::vector<double> xis = {0.5, 1.0, 2.0, 4.0};
  const std::vector<double> thetas = {0.0, kTwoPi / 16, kTwoPi / 8, 3 * kTwoPi / 16,
                                      kTwoPi / 4};
  std::ostringstream note;
  for (double dv : {0.2, 1.0}) {
    const auto table = build_table(NoiseParam(dv), 10.0, 64, grid);
    const auto rho0 = gaussian_density(10.0, 64, 1.0, 1.0);
    const auto rep = stability_scan(table, rho0, xis, thetas);
    c.expect(rep.pass, fmt("d=%g max|Im mu|=%.3e", dv, rep.max_im_abs));
    note << fmt("d=%g max|Im|=%.1e ", dv, rep.max_im_abs);

    const auto m = moments(table, rho0);
    WDensity weighted = rho0;
    for (int j = 0; j < table.n_w; ++j) weighted.values[j] *= table.rows[j].c1_tilde;
    const auto mw = moments(table, weighted);
    for (double xi : xis) {
      {  // theta = 0: pure convection root
        DispersionProblem p{&table, rho0, xi, 0.0, 1e-6};
        const double expected = m[1] / m[0] * xi;
        double best = 1e300;
        for (const auto& r : find_roots(p)) best = std::min(best, std::abs(r.mu - expected));
        c.expect(best <= 1e-6 * std::abs(expected),
                 fmt("d=%g xi=%g theta=0 err=%.3e", dv, xi, best));
      }
      {  // theta = pi/2: acoustic pair
        DispersionProblem p{&table, rho0, xi, kTwoPi / 4, 1e-6};
        const double expected = std::sqrt(mw[4] / m[0]) * std::abs(xi);
        const auto roots = find_roots(p);
        for (double sign : {-1.0, 1.0}) {
          double best = 1e300;
          for (const auto& r : roots) best = std::min(best, std::abs(r.mu - sign * expected));
          c.expect(best <= 1e-6 * expected,
                   fmt("d=%g xi=%g theta=pi/2 sign=%g err=%.3e", dv, xi, sign, best));
        }
      }
    }
  }
  return c.result(note.str());
}

// ---- criterion 8: hydro vs dispersion / eigenvalues --------------------------

CriterionResult crit_hydro_cross() {
  Check c;
  std::ostringstream note;
  const auto grid = periodic_grid(512);

  {  // W-resolved model, transverse wave against the dispersion root
    const double dv = 1.0;
    const auto table = build_table(NoiseParam(dv), 10.0, 64, grid);
    const auto rho0 = gaussian_density(10.0, 64, 1.0, 1.0);
    const double xi = 1.0;
    DispersionProblem p{&table, rho0, xi, kTwoPi / 4, 1e-6};
    const auto roots = find_roots(p);
    double mu_pred = 0.0;
    for (const auto& r : roots) mu_pred = std::max(mu_pred, r.mu.real());
    c.expect(mu_pred > 0.0, "no positive dispersion root");

    HydroStateL s;
    s.grid = HydroGrid{1024, 1, kTwoPi, 1.0};
    s.n_w = 64;
    s.w_max = 10.0;
    s.table = &table;
    s.phi.resize(1024);
    s.rho_w.resize(1024 * 64);
    const double eps = 1e-4;
    for (int i = 0; i < 1024; ++i) {
      const double x = s.grid.dx() * i;
      s.phi[i] = kTwoPi / 4 + eps * std::cos(xi * x);
      for (int k = 0; k < 64; ++k) {
        const double amp = -table.rows[k].c1_tilde * xi / mu_pred;
        s.rho_w[i * 64 + k] = rho0.values[k] * (1.0 + eps * amp * std::cos(xi * x));
      }
    }
    const double dt = 2.0e-3;
    const double t_end = 2.5 * kTwoPi / mu_pred;
    std::vector<double> times;
    std::vector<cplx> amps;
    std::vector<double> dev(1024);
    double t = 0.0;
    int step_count = 0;
    while (t < t_end) {
      if (step_count % 50 == 0) {
        for (int i = 0; i < 1024; ++i) dev[i] = wrap_pm_pi(s.phi[i] - kTwoPi / 4);
        times.push_back(t);
        amps.push_back(mode1(dev));
      }
      step_sohr_l(s, dt);
      t += dt;
      ++step_count;
    }
    const double mu_meas = -phase_slope(times, amps);
    const double rel = std::abs(mu_meas - mu_pred) / mu_pred;
    c.expect(rel <= 0.05, fmt("transverse wave: mu_meas=%.4f mu_pred=%.4f rel=%.3f", mu_meas,
                              mu_pred, rel));
    note << fmt("L-wave mu %.4f vs %.4f (rel %.3f); ", mu_meas, mu_pred, rel);
  }

  {  // density/direction model, longitudinal speeds against the eigenvalues
    const double dv = 1.0;
    NoiseParam d(dv);
    const double c1v = c1(d);
    const double c2v = c2(d, grid);
    const auto [gm, gp] = soh_eigenvalues(c1v, c2v, dv, 0.0);
    HydroStateS s;
    s.grid = HydroGrid{1024, 1, kTwoPi, 1.0};
    s.c1 = c1v;
    s.c2 = c2v;
    s.d = dv;
    s.rho.resize(1024);
    s.rho_y.assign(1024, 0.0);
    s.phi.resize(1024);
    const double eps = 1e-4;
    for (int i = 0; i < 1024; ++i) {
      const double x = s.grid.dx() * i;
      s.rho[i] = 1.0 + eps * std::cos(x);
      s.phi[i] = 0.0 + eps * std::cos(x);
    }
    const double dt = 2.0e-3;
    const double t_end = 15.0;
    std::vector<double> times;
    std::vector<cplx> rho_amp, phi_amp;
    std::vector<double> dev(1024);
    double t = 0.0;
    int step_count = 0;
    while (t < t_end) {
      if (step_count % 50 == 0) {
        times.push_back(t);
        for (int i = 0; i < 1024; ++i) dev[i] = s.rho[i] - 1.0;
        rho_amp.push_back(mode1(dev));
        for (int i = 0; i < 1024; ++i) dev[i] = wrap_pm_pi(s.phi[i]);
        phi_amp.push_back(mode1(dev));
      }
      step_sohr_s(s, dt);
      t += dt;
      ++step_count;
    }
    const double v_rho = -phase_slope(times, rho_amp);   // xi = 1
    const double v_phi = -phase_slope(times, phi_amp);
    const double meas_lo = std::min(v_rho, v_phi), meas_hi = std::max(v_rho, v_phi);
    const double rel_lo = std::abs(meas_lo - gm) / std::abs(gm);
    const double rel_hi = std::abs(meas_hi - gp) / std::abs(gp);
    c.expect(rel_lo <= 0.05, fmt("gamma- meas=%.4f ref=%.4f rel=%.3f", meas_lo, gm, rel_lo));
    c.expect(rel_hi <= 0.05, fmt("gamma+ meas=%.4f ref=%.4f rel=%.3f", meas_hi, gp, rel_hi));
    note << fmt("S-speeds (%.4f, %.4f) vs (%.4f, %.4f)", meas_lo, meas_hi, gm, gp);
  }
  return c.result(note.str());
}

// ---- criterion 9: particle-kinetic consistency -------------------------------

CriterionResult ibm_equilibrium_case(IbmLaw law, double w_value, int threads,
                                     std::string* summary) {
  Check c;
  const auto grid = periodic_grid(512);
  NoiseParam d(0.2);

  IbmParams p;
  p.nu = 1.0;
  p.diff = 0.2;  // d = diff/nu
  p.speed = 1.0;
  p.radius = 0.02;
  p.dt = 0.02;  // EM equilibrium bias measured ~4e-3 in L1 here
  p.box = 1.0;
  ParticleSystem sys = make_uniform_system(p, 100000, w_value, 20240901u);
  sys.threads = threads;
  double psi_ref = 0.0;
  if (law == IbmLaw::large) {
    const auto table = build_table(d, 2.0, 64, grid);
    sys.psi_table = make_psi_interpolant(table);
    psi_ref = sys.psi_table.value()(w_value / p.nu);
  }
  sys.params.law = law;
  validate(sys);

  const int burn_steps = static_cast<int>(std::lround(50.0 / p.nu / p.dt));
  for (int s = 0; s < burn_steps; ++s) step(sys);

  constexpr int kBins = 64;
  constexpr int kSamples = 25;
  constexpr int kSampleStride = 25;  // 0.5 / nu apart
  std::vector<double> hist(kBins, 0.0);
  double total = 0.0;
  for (int s = 0; s < kSamples; ++s) {
    for (int q = 0; q < kSampleStride; ++q) step(sys);
    const auto obs = observables(sys, {}, kBins, 1, 1);
    const double frame = obs.mean_direction - psi_ref;
    for (int k = 0; k < sys.n; ++k) {
      const double alpha = wrap_angle(sys.theta[k] - frame);
      const int b = std::min(kBins - 1, static_cast<int>(alpha / (kTwoPi / kBins)));
      hist[b] += 1.0;
      total += 1.0;
    }
  }

  // Reference bin masses of the predicted equilibrium profile.
  const auto gvm = solve_gvm(d, w_value / p.nu, grid);
  std::vector<double> ref(kBins, 0.0);
  const int per_bin = grid.n / kBins;
  for (int b = 0; b < kBins; ++b) {
    for (int j = 0; j < per_bin; ++j) ref[b] += gvm.phi[b * per_bin + j] * grid.weight;
  }
  double l1 = 0.0;
  for (int b = 0; b < kBins; ++b) l1 += std::abs(hist[b] / total - ref[b]);
  c.expect(l1 < 0.05, fmt("L1=%.4f", l1));
  *summary = fmt("L1=%.4f (tol 0.05)", l1);
  return c.result(*summary);
}

CriterionResult crit_ibm(int threads) {
  Check c;
  std::string s_large, s_small;
  const auto r1 = ibm_equilibrium_case(IbmLaw::large, 1.0, threads, &s_large);
  const auto r2 = ibm_equilibrium_case(IbmLaw::small, 0.0, threads, &s_small);
  c.expect(r1.pass, "law large: " + s_large);
  c.expect(r2.pass, "law small: " + s_small);
  return c.result("law large " + s_large + "; law small " + s_small);
}

// ---- criterion 10: figure-level features -------------------------------------

CriterionResult crit_figures() {
  Check c;
  const auto grid = periodic_grid(512);
  const auto tilted = solve_gvm(NoiseParam(0.2), 1.0, grid);
  c.expect(tilted.psi >= 0.5 && tilted.psi <= 1.5, fmt("psi(d=0.2,w=1)=%.4f", tilted.psi));

  const auto fast = solve_gvm(NoiseParam(1.0), 20.0, grid);
  double sup = 0.0;
  for (double v : fast.phi) sup = std::max(sup, std::abs(v - 1.0 / kTwoPi));
  c.expect(sup < 0.02, fmt("sup|Phi_20 - uniform|=%.4f", sup));

  const auto gvm0 = solve_gvm(NoiseParam(1.0), 0.0, grid);
  const auto gci0 = solve_gci(gvm0);
  double odd = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    odd = std::max(odd, std::abs(gci0.x[j] + gci0.x[(grid.n - j) % grid.n]));
  }
  c.expect(odd <= 1e-9, fmt("X_0 oddness=%.3e", odd));

  const auto g8 = solve_gvm(NoiseParam(1.0), 8.0, grid);
  const auto g10 = solve_gvm(NoiseParam(1.0), 10.0, grid);
  const auto a8 = compute_avector(g8, solve_gci(g8));
  const auto a10 = compute_avector(g10, solve_gci(g10));
  const double plateau = std::abs(a10.a[5] - a8.a[5]);
  // Under the defining normalization (zero-mean invariant) a6 decays exactly
  // like 1/(2W), so this difference sits at |1 - 8/10| = 25% of a6(10) and
  // the 20% threshold cannot be met; the plateau only exists for
  // max-normalized invariants (2W*a6 -> 1). Reported honestly.
  c.expect(plateau < 0.2 * std::abs(a10.a[5]),
           fmt("a6 plateau |a6(10)-a6(8)|=%.4f vs 0.2|a6(10)|=%.4f (law: 2W*a6 = %.3f, %.3f)",
               plateau, 0.2 * std::abs(a10.a[5]), 16.0 * a8.a[5], 20.0 * a10.a[5]));
  return c.result(fmt("psi=%.3f, uniform-dev=%.4f, odd=%.1e, plateau=%.4f vs %.4f", tilted.psi,
                      sup, odd, plateau, 0.2 * std::abs(a10.a[5])));
}

// ---- criterion 11: neighbor oracle and determinism ----------------------------

CriterionResult crit_neighbors() {
  Check c;
  IbmParams p;
  p.nu = 1.0;
  p.diff = 0.1;
  p.speed = 1.0;
  p.radius = 0.07;
  p.dt = 0.01;
  p.box = 1.0;
  ParticleSystem sys = make_uniform_system(p, 500, 0.5, 77u);
  double worst = 0.0;
  for (int k = 0; k < sys.n; ++k) {
    const Vec2 a = neighbor_flux(sys, k);
    const Vec2 b = neighbor_flux_brute(sys, k);
    worst = std::max({worst, std::abs(a.x - b.x), std::abs(a.y - b.y)});
  }
  c.expect(worst <= 1e-12, fmt("hash vs brute sup=%.3e", worst));

  auto run = [&]() {
    ParticleSystem s = make_uniform_system(p, 500, 0.5, 123u);
    s.threads = 1;
    for (int q = 0; q < 100; ++q) step(s);
    return s;
  };
  const auto s1 = run();
  const auto s2 = run();
  bool bitwise = true;
  for (int k = 0; k < s1.n; ++k) {
    bitwise = bitwise && s1.x[k] == s2.x[k] && s1.y[k] == s2.y[k] &&
              s1.theta[k] == s2.theta[k];
  }
  c.expect(bitwise, "serial determinism");
  return c.result(fmt("hash-vs-brute sup=%.3e; serial runs bitwise %s", worst,
                      bitwise ? "identical" : "DIFFER"));
}

}  // namespace

std::vector<Criterion> acceptance_criteria(const AcceptanceOptions& opts) {
  const int threads = resolve_threads(opts);
  std::vector<Criterion> out;
  out.push_back({1, "closed-form equilibrium (W=0)", "equilibrium", crit_equilibrium});
  out.push_back({2, "collision-invariant oracle and stencil order", "gci", crit_gci_oracle});
  out.push_back({3, "parity suite", "parity", crit_parity});
  out.push_back({4, "positivity of a1, a5", "positivity", crit_positivity});
  out.push_back({5, "identities at W=0", "identities", crit_identities});
  out.push_back({6, "small-zeta expansion rates", "smallzeta", crit_small_zeta});
  out.push_back({7, "dispersion realness and closed forms", "dispersion", crit_dispersion});
  out.push_back({8, "hydro-dispersion cross-check", "hydro", crit_hydro_cross});
  out.push_back({9, "particle-kinetic consistency", "ibm", [threads] { return crit_ibm(threads); }});
  out.push_back({10, "figure-level features", "figures", crit_figures});
  out.push_back({11, "neighbor oracle and determinism", "neighbors", crit_neighbors});
  return out;
}

bool run_acceptance(const AcceptanceOptions& opts, const std::vector<std::string>& tags,
                    std::string* csv_report) {
  auto criteria = acceptance_criteria(opts);
  if (!tags.empty()) {
    for (const auto& t : tags) {
      const bool known = std::any_of(criteria.begin(), criteria.end(),
                                     [&](const Criterion& c) { return c.tag == t; });
      if (!known) throw std::invalid_argument("unknown acceptance tag: " + t);
    }
  }
  bool all = true;
  std::ostringstream csv;
  csv << "id,name,tag,pass,detail\n";
  for (const auto& crit : criteria) {
    if (!tags.empty() &&
        std::find(tags.begin(), tags.end(), crit.tag) == tags.end()) {
      continue;
    }
    CriterionResult r;
    try {
      r = crit.run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2d  %-45s %s\n", r.pass ? "PASS" : "FAIL", crit.id, crit.name.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
    std::string quoted = r.detail;
    std::replace(quoted.begin(), quoted.end(), ',', ';');
    csv << crit.id << "," << crit.name << "," << crit.tag << ","
        << (r.pass ? "PASS" : "FAIL") << "," << quoted << "\n";
    all = all && r.pass;
  }
  if (csv_report != nullptr) *csv_report = csv.str();
  return all;
}

}  // namespace sohr
