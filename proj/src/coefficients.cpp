#include "sohr/coefficients.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sohr {

namespace {

double quad(const AngularGrid& grid, const std::vector<double>& f) {
  return trapezoid_periodic(grid, f);
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

AVector compute_avector(const GvmProfile& gvm, const GciProfile& gci) {
  if (gvm.grid.n != gci.grid.n || gvm.w != gci.w || gvm.d.value() != gci.d.value()) {
    throw std::invalid_argument("compute_avector: profiles do not share (d, w, grid)");
  }
  const AngularGrid& grid = gvm.grid;
  const int n = grid.n;
  const double d = gvm.d.value();
  const double w = gvm.w;
  const double lam = gvm.lambda;
  if (std::abs(lam) < 1e-12) throw std::runtime_error("compute_avector: degenerate lambda");

  std::vector<double> f(n);
  auto integral = [&](auto&& fn) {
    for (int j = 0; j < n; ++j) f[j] = fn(j);
    return quad(grid, f);
  };

  const auto& phi = gvm.phi;
  const auto& x = gci.x;
  const double psi = gvm.psi;

  AVector out;
  out.w = w;
  out.d = d;
  out.a[0] = integral([&](int j) { return (grid.sin_theta[j] - w) * phi[j] * x[j]; }) / (lam * d);
  out.a[1] = integral([&](int j) {
               return (grid.sin_theta[j] - w) * std::cos(grid.nodes[j] - psi) * phi[j] * x[j];
             }) / (lam * d) -
             gvm.c_const / lam *
                 integral([&](int j) { return std::cos(grid.nodes[j] - psi) * x[j]; });
  out.a[2] = integral([&](int j) {
               return (grid.sin_theta[j] - w) * std::sin(grid.nodes[j] - psi) * phi[j] * x[j];
             }) / (lam * d) -
             gvm.c_const / lam *
                 integral([&](int j) { return std::sin(grid.nodes[j] - psi) * x[j]; });
  out.a[3] = -gvm.c1_tilde * integral([&](int j) { return phi[j] * x[j]; });
  out.a[4] = integral([&](int j) { return std::sin(grid.nodes[j] - psi) * phi[j] * x[j]; });
  out.a[5] = integral(
      [&](int j) { return (std::cos(grid.nodes[j] - psi) - gvm.c1_tilde) * phi[j] * x[j]; });
  for (double v : out.a) {
    if (!std::isfinite(v)) throw std::runtime_error("compute_avector: non-finite coefficient");
  }
  return out;
}

double CoefficientTable::interp_psi(double w) const {
  if (rows.empty()) throw std::runtime_error("interp_psi: empty table");
  if (w < rows.front().w || w > rows.back().w) {
    throw std::domain_error("interp_psi: w = " + std::to_string(w) +
                            " outside tabulated range [" + std::to_string(rows.front().w) +
                            ", " + std::to_string(rows.back().w) + "]");
  }
  size_t hi = 1;
  while (hi + 1 < rows.size() && rows[hi].w < w) ++hi;
  const auto& r0 = rows[hi - 1];
  const auto& r1 = rows[hi];
  const double t = (w - r0.w) / (r1.w - r0.w);
  return (1.0 - t) * r0.psi + t * r1.psi;
}

CoefficientTable::ParityCheck CoefficientTable::parity_check(double tol) const {
  ParityCheck pc;
  const int nw = static_cast<int>(rows.size());
  for (int j = 0; j < nw; ++j) {
    const auto& p = rows[nw - 1 - j];  // row at -w
    const auto& q = rows[j];
    for (int k : {0, 1, 4}) pc.even_defect = std::max(pc.even_defect, std::abs(q.a[k] - p.a[k]));
    pc.even_defect = std::max(pc.even_defect, std::abs(q.c1_tilde - p.c1_tilde));
    pc.even_defect = std::max(pc.even_defect, std::abs(q.lambda - p.lambda));
    for (int k : {2, 3, 5}) pc.odd_defect = std::max(pc.odd_defect, std::abs(q.a[k] + p.a[k]));
    pc.odd_defect = std::max(pc.odd_defect, std::abs(q.psi + p.psi));
  }
  pc.pass = pc.even_defect < tol && pc.odd_defect < tol;
  return pc;
}

CoefficientTable build_table(NoiseParam d, double w_max, int n_w, const AngularGrid& grid,
                             bool parallel) {
  if (n_w < 2 || n_w % 2 != 0) throw std::invalid_argument("build_table: n_w must be even >= 2");
  if (w_max * kTwoPi / d.value() > 700.0) {
    throw std::domain_error("build_table: w_max exceeds the overflow guard; max here is " +
                            std::to_string(gvm_w_guard(d.value())));
  }
  CoefficientTable table;
  table.d = d.value();
  table.w_max = w_max;
  table.n_w = n_w;
  table.n_theta = grid.n;
  table.rows.resize(n_w);
  table.phi.resize(n_w);
  table.x.resize(n_w);

  const double dw = table.dw();
  auto worker = [&](int j) {
    const double w = (j + 0.5 - 0.5 * n_w) * dw;  // symmetric midpoints
    try {
      const auto gvm = solve_gvm(d, w, grid);
      const auto gci = solve_gci(gvm);
      const auto av = compute_avector(gvm, gci);
      table.rows[j] = CoefficientRow{w, av.a, gvm.c1_tilde, gvm.psi, gvm.lambda};
      table.phi[j] = gvm.phi;
      table.x[j] = gci.x;
    } catch (const std::exception& e) {
      throw std::runtime_error("build_table: node (d=" + std::to_string(d.value()) +
                               ", w=" + std::to_string(w) + "): " + e.what());
    }
  };

  if (!parallel) {
    for (int j = 0; j < n_w; ++j) worker(j);
    return table;
  }
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int n_threads = static_cast<int>(std::min<unsigned>(hw, n_w));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int j = t; j < n_w; j += n_threads) worker(j);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return table;
}

void save_table_csv(const CoefficientTable& table, const std::string& path,
                    const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_table_csv: cannot open " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "# d=" << format_full(table.d) << " w_max=" << format_full(table.w_max)
      << " n_w=" << table.n_w << " n_theta=" << table.n_theta << "\n";
  out << "w,a1,a2,a3,a4,a5,a6,c1_tilde,psi,lambda\n";
  for (const auto& r : table.rows) {
    out << format_full(r.w);
    for (double a : r.a) out << ',' << format_full(a);
    out << ',' << format_full(r.c1_tilde) << ',' << format_full(r.psi) << ','
        << format_full(r.lambda) << "\n";
  }
}

CoefficientTable load_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_table_csv: cannot open " + path);
  CoefficientTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "d") table.d = std::strtod(val.c_str(), nullptr);
        if (key == "w_max") table.w_max = std::strtod(val.c_str(), nullptr);
        if (key == "n_w") table.n_w = std::atoi(val.c_str());
        if (key == "n_theta") table.n_theta = std::atoi(val.c_str());
      }
      continue;
    }
    if (!header_seen) {  // column names
      header_seen = true;
      continue;
    }
    CoefficientRow r;
    std::istringstream ss(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(ss, field, ',')) vals.push_back(std::strtod(field.c_str(), nullptr));
    if (vals.size() != 10) throw std::runtime_error("load_table_csv: malformed row: " + line);
    r.w = vals[0];
    for (int k = 0; k < 6; ++k) r.a[k] = vals[1 + k];
    r.c1_tilde = vals[7];
    r.psi = vals[8];
    r.lambda = vals[9];
    table.rows.push_back(r);
  }
  if (table.rows.empty()) throw std::runtime_error("load_table_csv: no rows in " + path);
  if (table.n_w == 0) table.n_w = static_cast<int>(table.rows.size());
  return table;
}

double WDensity::mass() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * dw();
}

double WDensity::rho_y() const {
  const double step = dw();
  double sum = 0.0;
  for (int j = 0; j < n_w; ++j) {
    const double w = (j + 0.5 - 0.5 * n_w) * step;
    sum += w * values[j];
  }
  return sum * step;
}

bool WDensity::is_even(double tol) const {
  for (int j = 0; j < n_w; ++j) {
    if (std::abs(values[j] - values[n_w - 1 - j]) > tol) return false;
  }
  return true;
}

WDensity gaussian_density(double w_max, int n_w, double sigma, double total_mass) {
  WDensity rho{w_max, n_w, std::vector<double>(n_w)};
  const double step = rho.dw();
  for (int j = 0; j < n_w; ++j) {
    const double w = (j + 0.5 - 0.5 * n_w) * step;
    rho.values[j] = std::exp(-0.5 * w * w / (sigma * sigma));
  }
  const double m = rho.mass();
  for (double& v : rho.values) v *= total_mass / m;
  return rho;
}

std::array<double, 6> moments(const CoefficientTable& table, const WDensity& rho) {
  if (rho.n_w != table.n_w || rho.w_max != table.w_max) {
    throw std::invalid_argument("moments: density grid does not match the table");
  }
  std::array<double, 6> m{};
  const double dw = table.dw();
  for (int j = 0; j < table.n_w; ++j) {
    for (int k = 0; k < 6; ++k) m[k] += table.rows[j].a[k] * rho.values[j] * dw;
  }
  return m;
}

SmallZetaCoeffs small_zeta_coeffs(NoiseParam d, const PerturbationProfiles& pert) {
  const AngularGrid& grid = pert.grid;
  const int n = grid.n;
  const double dv = d.value();
  const double c1d = c1(d);

  std::vector<double> env(n), inv_env(n);
  for (int j = 0; j < n; ++j) {
    env[j] = std::exp((grid.cos_theta[j] - 1.0) / dv);
    inv_env[j] = 1.0 / env[j];
  }
  const double z = quad(grid, env);
  std::vector<double> phi0(n);
  for (int j = 0; j < n; ++j) phi0[j] = env[j] / z;

  const auto g = g_profile(d, grid);
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) x0[j] = g[j] / dv;

  std::vector<double> f(n);
  auto integral = [&](auto&& fn) {
    for (int j = 0; j < n; ++j) f[j] = fn(j);
    return quad(grid, f);
  };

  const double lambda0 =
      integral([&](int j) { return phi0[j] * grid.sin_theta[j] * grid.sin_theta[j]; }) /
      (dv * c1d);
  const double s0 = integral([&](int j) { return phi0[j] * x0[j] * grid.sin_theta[j]; });
  // d/dW of the first-integral constant at W = 0.
  const double c1_const = -(kTwoPi / dv) / (z * quad(grid, inv_env));

  SmallZetaCoeffs out;
  out.a1_0 = s0 / (dv * lambda0);

  const auto& phi1 = pert.phi1;
  const auto& x1 = pert.x1;
  const double cross = integral([&](int j) { return phi0[j] * x1[j] + phi1[j] * x0[j]; });
  const double sc_cross = integral([&](int j) {
    const double s = grid.sin_theta[j];
    return s * s * (phi0[j] * x1[j] + phi1[j] * x0[j]);
  });
  const double sincos0 = integral(
      [&](int j) { return grid.sin_theta[j] * grid.cos_theta[j] * phi0[j] * x0[j]; });
  const double sinx0 = integral([&](int j) { return grid.sin_theta[j] * x0[j]; });
  const double cos_cross =
      integral([&](int j) { return (grid.cos_theta[j] - c1d) * (phi0[j] * x1[j] + phi1[j] * x0[j]); });

  out.a3_1 = (sc_cross - s0 - (pert.beta / c1d) * sincos0) / (lambda0 * dv) -
             (c1_const / lambda0) * sinx0;
  out.a4_1 = -c1d * cross;
  out.a6_1 = cos_cross + (pert.beta / c1d) * s0;
  out.c3 = out.a3_1 / out.a1_0;
  out.c4 = out.a4_1 / out.a1_0;
  out.c6 = out.a6_1 / out.a1_0;
  return out;
}

}  // namespace sohr
