#include "sohr/hydro.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "sohr/geometry.hpp"

namespace sohr {

namespace {

constexpr double kCflLimit = 0.45;
constexpr double kVacuumFraction = 1e-10;

// One conservative local Lax-Friedrichs sweep along an axis for a scalar
// carried by velocity coef * component(phi). axis 0: component = cos(phi),
// axis 1: component = sin(phi).
void llf_sweep(const HydroGrid& g, std::vector<double>& u, const std::vector<double>& phi,
               double coef, double alpha, double dt, int axis) {
  const int nx = g.nx, ny = g.ny;
  const double h = axis == 0 ? g.dx() : g.dy();
  std::vector<double> flux(u.size());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int c = g.idx(ix, iy);
      flux[c] = coef * u[c] * (axis == 0 ? std::cos(phi[c]) : std::sin(phi[c]));
    }
  }
  std::vector<double> un = u;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int c = g.idx(ix, iy);
      const int cm = axis == 0 ? g.idx((ix + nx - 1) % nx, iy) : g.idx(ix, (iy + ny - 1) % ny);
      const int cp = axis == 0 ? g.idx((ix + 1) % nx, iy) : g.idx(ix, (iy + 1) % ny);
      const double f_right = 0.5 * (flux[c] + flux[cp]) - 0.5 * alpha * (u[cp] - u[c]);
      const double f_left = 0.5 * (flux[cm] + flux[c]) - 0.5 * alpha * (u[c] - u[cm]);
      un[c] = u[c] - dt / h * (f_right - f_left);
    }
  }
  u.swap(un);
}

// Angle sweep: upwinded advection by `speed`, explicit source, and the
// Lax-Friedrichs smoothing that keeps the pressure coupling stable.
// Differences of phi are wrapped to (-pi, pi].
void angle_sweep(const HydroGrid& g, std::vector<double>& phi, const std::vector<double>& speed,
                 const std::vector<double>& source, const std::vector<bool>& frozen,
                 double alpha, double dt, int axis) {
  const int nx = g.nx, ny = g.ny;
  const double h = axis == 0 ? g.dx() : g.dy();
  std::vector<double> pn = phi;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int c = g.idx(ix, iy);
      if (frozen[c]) continue;
      const int cm = axis == 0 ? g.idx((ix + nx - 1) % nx, iy) : g.idx(ix, (iy + ny - 1) % ny);
      const int cp = axis == 0 ? g.idx((ix + 1) % nx, iy) : g.idx(ix, (iy + 1) % ny);
      const double dminus = wrap_pm_pi(phi[c] - phi[cm]);
      const double dplus = wrap_pm_pi(phi[cp] - phi[c]);
      const double a = speed[c];
      const double adv = (a > 0.0 ? a * dminus : a * dplus) / h;
      const double diff = 0.5 * alpha * (dplus - dminus) / h;
      pn[c] = phi[c] + dt * (-adv - source[c] + diff);
    }
  }
  phi.swap(pn);
}

std::vector<bool> vacuum_mask(const std::vector<double>& rho) {
  double mean = 0.0;
  for (double v : rho) mean += v;
  mean /= static_cast<double>(rho.size());
  std::vector<bool> frozen(rho.size(), false);
  for (size_t i = 0; i < rho.size(); ++i) frozen[i] = rho[i] < kVacuumFraction * mean;
  return frozen;
}

void check_positive_density(const std::vector<double>& rho, const char* who) {
  for (double v : rho) {
    if (!(v > 0.0)) throw std::runtime_error(std::string(who) + ": vacuum cell (rho <= 0)");
  }
}

// Central derivative of a scalar field along an axis.
double central(const HydroGrid& g, const std::vector<double>& f, int ix, int iy, int axis) {
  const int nx = g.nx, ny = g.ny;
  if (axis == 0) {
    return (f[g.idx((ix + 1) % nx, iy)] - f[g.idx((ix + nx - 1) % nx, iy)]) / (2.0 * g.dx());
  }
  return (f[g.idx(ix, (iy + 1) % ny)] - f[g.idx(ix, (iy + ny - 1) % ny)]) / (2.0 * g.dy());
}

void step_small_family(HydroStateS& s, double dt, bool with_rotation) {
  const HydroGrid& g = s.grid;
  const double inv_h = 1.0 / g.dx() + (g.ny > 1 ? 1.0 / g.dy() : 0.0);
  const double cfl_speed = std::max({std::abs(s.c1), std::abs(s.c2), std::sqrt(s.d)});
  if (dt * cfl_speed * inv_h > kCflLimit) {
    throw std::invalid_argument("step_sohr_s: CFL violation, dt too large");
  }
  check_positive_density(s.rho, "step_sohr_s");
  const double alpha = std::max(std::abs(s.c1), std::abs(s.c2)) + std::sqrt(s.d);
  const auto frozen = vacuum_mask(s.rho);

  const int axes = g.ny > 1 ? 2 : 1;
  for (int axis = 0; axis < axes; ++axis) {
    // Angle update uses the pre-sweep density.
    std::vector<double> speed(g.cells()), source(g.cells());
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const int c = g.idx(ix, iy);
        const double cs = std::cos(s.phi[c]), sn = std::sin(s.phi[c]);
        const double omega_comp = axis == 0 ? cs : sn;
        const double perp_comp = axis == 0 ? -sn : cs;
        speed[c] = s.c2 * omega_comp;
        source[c] = s.d / s.rho[c] * perp_comp * central(g, s.rho, ix, iy, axis);
      }
    }
    std::vector<double> phi_before = s.phi;
    angle_sweep(g, s.phi, speed, source, frozen, alpha, dt, axis);
    llf_sweep(g, s.rho, phi_before, s.c1, alpha, dt, axis);
    if (with_rotation) llf_sweep(g, s.rho_y, phi_before, s.c1, alpha, dt, axis);
  }
  if (with_rotation) {
    for (int c = 0; c < g.cells(); ++c) {
      if (!frozen[c]) s.phi[c] += dt * (s.rho_y[c] / s.rho[c]);
    }
  }
  for (double& a : s.phi) a = wrap_angle(a);
}

}  // namespace

void step_sohr_s(HydroStateS& s, double dt) { step_small_family(s, dt, true); }

void step_soh(HydroStateS& s, double dt) { step_small_family(s, dt, false); }

void step_sohr_l(HydroStateL& s, double dt) {
  const HydroGrid& g = s.grid;
  if (s.table == nullptr) throw std::invalid_argument("step_sohr_l: missing coefficient table");
  const CoefficientTable& tab = *s.table;
  if (tab.n_w != s.n_w || tab.w_max != s.w_max) {
    throw std::invalid_argument("step_sohr_l: table grid does not match state bins");
  }
  const int nw = s.n_w;
  const double dw = tab.dw();
  for (double v : s.rho_w) {
    if (v < 0.0) throw std::runtime_error("step_sohr_l: negative bin density");
  }

  double c1t_max = 0.0;
  for (const auto& r : tab.rows) c1t_max = std::max(c1t_max, std::abs(r.c1_tilde));

  const int cells = g.cells();
  std::vector<double> m1(cells), m2(cells), m3(cells), m4(cells), m5f(cells), m6f(cells);
  std::vector<double> m5c(cells);  // m5 of c1_tilde-weighted density, for the wave bound
  auto recompute_moments = [&]() {
    for (int c = 0; c < cells; ++c) {
      const double* bins = s.cell_bins(c);
      double acc[6] = {0, 0, 0, 0, 0, 0};
      double acc5c = 0.0;
      for (int k = 0; k < nw; ++k) {
        const auto& r = tab.rows[k];
        const double rw = bins[k] * dw;
        for (int q = 0; q < 6; ++q) acc[q] += r.a[q] * rw;
        acc5c += r.a[4] * r.c1_tilde * rw;
      }
      m1[c] = acc[0];
      m2[c] = acc[1];
      m3[c] = acc[2];
      m4[c] = acc[3];
      m5f[c] = acc[4];
      m6f[c] = acc[5];
      m5c[c] = acc5c;
      if (!(m1[c] > 0.0)) {
        throw std::runtime_error("step_sohr_l: m1 <= 0 in cell " + std::to_string(c));
      }
    }
  };
  recompute_moments();

  double adv_max = 0.0, acoustic2_max = 0.0;
  std::vector<double> rho_tot(cells);
  for (int c = 0; c < cells; ++c) {
    const double* bins = s.cell_bins(c);
    double rt = 0.0;
    for (int k = 0; k < nw; ++k) rt += bins[k] * dw;
    rho_tot[c] = rt;
    adv_max = std::max(adv_max, (std::abs(m2[c]) + std::abs(m3[c]) + std::abs(m4[c])) / m1[c]);
    acoustic2_max = std::max(acoustic2_max, std::max(0.0, m5c[c] / m1[c]));
  }
  const double bound = c1t_max + adv_max + std::sqrt(acoustic2_max);
  const double inv_h = 1.0 / g.dx() + (g.ny > 1 ? 1.0 / g.dy() : 0.0);
  if (dt * bound * inv_h > kCflLimit) {
    throw std::invalid_argument("step_sohr_l: CFL violation, dt too large");
  }
  const double alpha = bound;
  const auto frozen = vacuum_mask(rho_tot);

  std::vector<double> bin(cells);
  const int axes = g.ny > 1 ? 2 : 1;
  for (int axis = 0; axis < axes; ++axis) {
    std::vector<double> speed(cells), source(cells);
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const int c = g.idx(ix, iy);
        const double cs = std::cos(s.phi[c]), sn = std::sin(s.phi[c]);
        const double omega_comp = axis == 0 ? cs : sn;
        const double perp_comp = axis == 0 ? -sn : cs;
        speed[c] = (m2[c] * omega_comp + (m3[c] + m4[c]) * perp_comp) / m1[c];
        source[c] = (perp_comp * central(g, m5f, ix, iy, axis) +
                     omega_comp * central(g, m6f, ix, iy, axis)) /
                    m1[c];
      }
    }
    std::vector<double> phi_before = s.phi;
    angle_sweep(g, s.phi, speed, source, frozen, alpha, dt, axis);
    for (int k = 0; k < nw; ++k) {
      for (int c = 0; c < cells; ++c) bin[c] = s.cell_bins(c)[k];
      llf_sweep(g, bin, phi_before, tab.rows[k].c1_tilde, alpha, dt, axis);
      for (int c = 0; c < cells; ++c) s.cell_bins(c)[k] = bin[c];
    }
    if (axis + 1 < axes) recompute_moments();
  }
  for (double& a : s.phi) a = wrap_angle(a);
}

void step_reduced(HydroStateS& s, double zeta, const ReducedCoeffs& rc, double dt) {
  const HydroGrid& g = s.grid;
  const double inv_h = 1.0 / g.dx() + (g.ny > 1 ? 1.0 / g.dy() : 0.0);
  const double cfl_speed =
      std::max({std::abs(s.c1), std::abs(rc.c2), std::sqrt(std::max(0.0, rc.c5))});
  if (dt * cfl_speed * inv_h > kCflLimit) {
    throw std::invalid_argument("step_reduced: CFL violation, dt too large");
  }
  check_positive_density(s.rho, "step_reduced");
  const auto frozen = vacuum_mask(s.rho);

  // Dissipation bound mirrors the W-resolved stepper at the matched state so
  // the two schemes agree to the order of the expansion.
  double ymax = 0.0;
  for (int c = 0; c < g.cells(); ++c) ymax = std::max(ymax, std::abs(s.rho_y[c] / s.rho[c]));
  const double alpha = s.c1 + std::abs(rc.c2) + zeta * ymax * (std::abs(rc.c3) + std::abs(rc.c4)) +
                       std::sqrt(std::max(0.0, rc.c5 * s.c1));

  const int axes = g.ny > 1 ? 2 : 1;
  std::vector<double> rho_y_field(g.cells());
  for (int axis = 0; axis < axes; ++axis) {
    std::vector<double> speed(g.cells()), source(g.cells());
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const int c = g.idx(ix, iy);
        const double cs = std::cos(s.phi[c]), sn = std::sin(s.phi[c]);
        const double omega_comp = axis == 0 ? cs : sn;
        const double perp_comp = axis == 0 ? -sn : cs;
        const double y = s.rho_y[c] / s.rho[c];
        speed[c] = rc.c2 * omega_comp + zeta * y * (rc.c3 + rc.c4) * perp_comp;
        source[c] = rc.c5 / s.rho[c] * perp_comp * central(g, s.rho, ix, iy, axis) +
                    zeta * rc.c6 / s.rho[c] * omega_comp * central(g, s.rho_y, ix, iy, axis);
      }
    }
    std::vector<double> phi_before = s.phi;
    angle_sweep(g, s.phi, speed, source, frozen, alpha, dt, axis);
    llf_sweep(g, s.rho, phi_before, s.c1, alpha, dt, axis);
    llf_sweep(g, s.rho_y, phi_before, s.c1, alpha, dt, axis);
  }
  for (double& a : s.phi) a = wrap_angle(a);
}

std::pair<double, double> soh_eigenvalues(double c1, double c2, double d, double theta) {
  if (!(d > 0.0)) throw std::invalid_argument("soh_eigenvalues: d must be positive");
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double rad = std::sqrt((c2 - c1) * (c2 - c1) * cs * cs + 4.0 * d * sn * sn);
  const double mean = (c1 + c2) * cs;
  return {0.5 * (mean - rad), 0.5 * (mean + rad)};
}

double total_mass(const HydroStateS& s) {
  double sum = 0.0;
  for (double v : s.rho) sum += v;
  return sum * s.grid.dx() * (s.grid.ny > 1 ? s.grid.dy() : 1.0);
}

std::vector<double> bin_masses(const HydroStateL& s) {
  std::vector<double> out(s.n_w, 0.0);
  for (int c = 0; c < s.grid.cells(); ++c) {
    const double* bins = s.cell_bins(c);
    for (int k = 0; k < s.n_w; ++k) out[k] += bins[k];
  }
  const double cell = s.grid.dx() * (s.grid.ny > 1 ? s.grid.dy() : 1.0);
  for (double& v : out) v *= cell;
  return out;
}

void save_state_2d(const HydroStateS& s, const std::string& path,
                   const std::string& header_comment) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("save_state_2d: cannot open " + path);
  const auto dump = [&](const std::vector<double>& f) {
    bin.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
  };
  dump(s.rho);
  dump(s.rho_y);
  dump(s.phi);

  std::ofstream side(path + ".csv");
  if (!side) throw std::runtime_error("save_state_2d: cannot open sidecar for " + path);
  if (!header_comment.empty()) side << "# " << header_comment << "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "nx=%d\nny=%d\nlx=%.17g\nly=%.17g\nc1=%.17g\nc2=%.17g\nd=%.17g\n"
                "layout=rho,rho_y,phi\n",
                s.grid.nx, s.grid.ny, s.grid.lx, s.grid.ly, s.c1, s.c2, s.d);
  side << buf;
}

HydroStateS load_state_2d(const std::string& path) {
  std::ifstream side(path + ".csv");
  if (!side) throw std::runtime_error("load_state_2d: missing sidecar " + path + ".csv");
  HydroStateS s;
  std::string line;
  while (std::getline(side, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "nx") s.grid.nx = std::atoi(val.c_str());
    else if (key == "ny") s.grid.ny = std::atoi(val.c_str());
    else if (key == "lx") s.grid.lx = std::strtod(val.c_str(), nullptr);
    else if (key == "ly") s.grid.ly = std::strtod(val.c_str(), nullptr);
    else if (key == "c1") s.c1 = std::strtod(val.c_str(), nullptr);
    else if (key == "c2") s.c2 = std::strtod(val.c_str(), nullptr);
    else if (key == "d") s.d = std::strtod(val.c_str(), nullptr);
  }
  if (s.grid.nx <= 0 || s.grid.ny <= 0) {
    throw std::runtime_error("load_state_2d: bad grid in sidecar");
  }
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("load_state_2d: cannot open " + path);
  const size_t cells = static_cast<size_t>(s.grid.cells());
  const auto slurp = [&](std::vector<double>& f) {
    f.resize(cells);
    bin.read(reinterpret_cast<char*>(f.data()),
             static_cast<std::streamsize>(cells * sizeof(double)));
    if (static_cast<size_t>(bin.gcount()) != cells * sizeof(double)) {
      throw std::runtime_error("load_state_2d: truncated binary payload");
    }
  };
  slurp(s.rho);
  slurp(s.rho_y);
  slurp(s.phi);
  return s;
}

}  // namespace sohr
