#include "sohr/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sohr/acceptance.hpp"
#include "sohr/coefficients.hpp"
#include "sohr/dispersion.hpp"
#include "sohr/gci.hpp"
#include "sohr/gvm.hpp"
#include "sohr/hydro.hpp"
#include "sohr/ibm.hpp"
#include "sohr/vmf.hpp"

namespace sohr {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::ofstream open_output(const std::string& path, const RunConfig& cfg,
                          const CommonOptions& common, const std::string& command) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << "# " << kArtifactVersion << " cmd=" << command << " seed=" << common.seed
      << " serial=" << (common.serial ? 1 : 0);
  for (const auto& [k, v] : cfg.items()) out << ' ' << k << '=' << v;
  out << "\n";
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tag_of(double v) {
  std::ostringstream ss;
  ss << v;
  auto s = ss.str();
  for (char& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return s;
}

}  // namespace

int cmd_coeffs(const RunConfig& cfg, const CommonOptions& common) {
  cfg.check_known({"d", "w_max", "n_w", "n_theta"});
  const auto ds = cfg.get_list("d", {0.2, 1.0, 5.0});
  const double w_max = cfg.get_double("w_max", 10.0);
  const int n_w = static_cast<int>(cfg.get_int("n_w", 64));
  const int n_theta = static_cast<int>(cfg.get_int("n_theta", 512));
  for (double dv : ds) {
    if (w_max * kTwoPi / dv > 700.0) {
      throw ConfigError("coeffs: w_max = " + std::to_string(w_max) +
                        " exceeds the overflow guard at d = " + std::to_string(dv) +
                        " (max " + std::to_string(gvm_w_guard(dv)) + ")");
    }
  }
  const auto grid = periodic_grid(n_theta);

  bool all_pass = true;
  auto report = open_output(join_path(common.out_dir, "coeffs_report.txt"), cfg, common,
                            "coeffs");
  for (double dv : ds) {
    const auto table = build_table(NoiseParam(dv), w_max, n_w, grid, !common.serial);
    const std::string file = join_path(common.out_dir, "coeffs_d" + tag_of(dv) + ".csv");
    std::ostringstream header;
    header << kArtifactVersion << " cmd=coeffs d=" << num(dv) << " w_max=" << num(w_max)
           << " n_w=" << n_w << " n_theta=" << n_theta;
    save_table_csv(table, file, header.str());

    const auto parity = table.parity_check();
    bool positive = true;
    for (const auto& r : table.rows) positive = positive && r.a[0] > 0.0 && r.a[4] > 0.0;
    report << "d=" << num(dv) << " parity: " << (parity.pass ? "PASS" : "FAIL")
           << " (even " << num(parity.even_defect) << ", odd " << num(parity.odd_defect)
           << ") positivity(a1,a5): " << (positive ? "PASS" : "FAIL") << "\n";
    std::printf("coeffs d=%g -> %s ; parity: %s ; positivity: %s\n", dv, file.c_str(),
                parity.pass ? "PASS" : "FAIL", positive ? "PASS" : "FAIL");
    all_pass = all_pass && parity.pass && positive;
  }
  return all_pass ? 0 : 1;
}

int cmd_profiles(const RunConfig& cfg, const CommonOptions& common) {
  cfg.check_known({"d", "w", "n_theta", "gci_scale", "gci_form"});
  const auto ds = cfg.get_list("d", {0.2, 1.0, 5.0});
  const auto ws = cfg.get_list("w", {0.0, 1.0, 5.0, 20.0});
  const int n_theta = static_cast<int>(cfg.get_int("n_theta", 512));
  const double gci_scale = cfg.get_double("gci_scale", 1.0);
  const std::string form_name = cfg.get_string("gci_form", "scaled");
  if (form_name != "scaled" && form_name != "unit") {
    throw ConfigError("profiles: gci_form must be 'scaled' or 'unit'");
  }
  const GciForm form = form_name == "unit" ? GciForm::unit : GciForm::scaled;
  if (ds.empty() || ws.empty()) throw ConfigError("profiles: empty (d, w) matrix");
  const auto grid = periodic_grid(n_theta);

  for (double dv : ds) {
    for (double wv : ws) {
      const auto gvm = solve_gvm(NoiseParam(dv), wv, grid);
      const auto gci = solve_gci(gvm, form);
      const std::string suffix = "_d" + tag_of(dv) + "_w" + tag_of(wv) + ".csv";
      {
        auto out = open_output(join_path(common.out_dir, "gvm" + suffix), cfg, common,
                               "profiles");
        out << "theta,phi\n";
        for (int j = 0; j < grid.n; ++j) {
          out << num(grid.nodes[j]) << ',' << num(gvm.phi[j]) << "\n";
        }
      }
      {
        auto out = open_output(join_path(common.out_dir, "gci" + suffix), cfg, common,
                               "profiles");
        out << "theta,x\n";
        for (int j = 0; j < grid.n; ++j) {
          out << num(grid.nodes[j]) << ',' << num(gci_scale * gci.x[j]) << "\n";
        }
      }
    }
  }
  std::printf("profiles: wrote %zu x %zu (d, w) matrix to %s\n", ds.size(), ws.size(),
              common.out_dir.c_str());
  return 0;
}

int cmd_ibm(const RunConfig& cfg, const CommonOptions& common) {
  cfg.check_known({"n", "nu", "diff", "speed", "radius", "dt", "t_end", "law", "w",
                   "table_w_max", "table_n_w", "n_theta", "obs_every", "box",
                   "equilibrium_check", "threads"});
  IbmParams p;
  p.nu = cfg.get_double("nu", 1.0);
  p.diff = cfg.get_double("diff", 0.2);
  p.speed = cfg.get_double("speed", 1.0);
  p.radius = cfg.get_double("radius", 0.05);
  p.dt = cfg.get_double("dt", 0.01);
  p.box = cfg.get_double("box", 1.0);
  const std::string law = cfg.get_string("law", "s");
  if (law != "s" && law != "l") throw ConfigError("ibm: law must be 's' or 'l'");
  const IbmLaw law_kind = law == "l" ? IbmLaw::large : IbmLaw::small;
  const int n = static_cast<int>(cfg.get_int("n", 1000));
  const double w_value = cfg.get_double("w", 0.0);
  const double t_end = cfg.get_double("t_end", 1.0);
  const double obs_every = cfg.get_double("obs_every", 10.0 * p.dt);
  const int n_theta = static_cast<int>(cfg.get_int("n_theta", 512));

  // Construct under the plain law; the tilt table, needed before the large
  // law can validate, is attached right after.
  ParticleSystem sys = make_uniform_system(p, n, w_value, common.seed);
  sys.threads = common.serial ? 1 : static_cast<int>(cfg.get_int("threads", 4));
  const auto grid = periodic_grid(n_theta);
  if (law_kind == IbmLaw::large) {
    const double d_eff = p.diff / p.nu;
    const double w_max = cfg.get_double("table_w_max", 2.0 * std::abs(w_value / p.nu) + 1.0);
    const int table_n_w = static_cast<int>(cfg.get_int("table_n_w", 64));
    const auto table = build_table(NoiseParam(d_eff), w_max, table_n_w, grid, !common.serial);
    sys.psi_table = make_psi_interpolant(table);
  }
  sys.params.law = law_kind;
  p.law = law_kind;
  validate(sys);

  auto obs_file = open_output(join_path(common.out_dir, "ibm_observables.csv"), cfg, common,
                              "ibm");
  obs_file << "t,flux_x,flux_y,order,mean_direction\n";
  const int steps = static_cast<int>(std::ceil(t_end / p.dt));
  const int obs_stride = std::max(1, static_cast<int>(std::lround(obs_every / p.dt)));
  for (int s = 0; s < steps; ++s) {
    if (s % obs_stride == 0) {
      const auto obs = observables(sys, {}, 64, 1, 1);
      obs_file << num(s * p.dt) << ',' << num(obs.flux.x) << ',' << num(obs.flux.y) << ','
               << num(obs.order) << ',' << num(obs.mean_direction) << "\n";
    }
    step(sys);
  }
  save_particles_csv(sys, join_path(common.out_dir, "ibm_final.csv"));

  // State checksum for reproducibility comparisons.
  double checksum = 0.0;
  for (int k = 0; k < sys.n; ++k) {
    checksum += sys.x[k] + 3.0 * sys.y[k] + 7.0 * sys.theta[k];
  }
  std::printf("ibm: %d particles, %d steps, checksum %.17g\n", sys.n, steps, checksum);

  int rc = 0;
  if (cfg.get_bool("equilibrium_check", false)) {
    const double d_eff = p.diff / p.nu;
    const auto gvm = solve_gvm(NoiseParam(d_eff), w_value / p.nu, grid);
    const double psi_ref =
        p.law == IbmLaw::large ? sys.psi_table.value()(w_value / p.nu) : 0.0;
    constexpr int kBins = 64;
    const auto obs = observables(sys, {}, kBins, 1, 1);
    std::vector<double> hist(kBins, 0.0);
    for (int k = 0; k < sys.n; ++k) {
      const double alpha = wrap_angle(sys.theta[k] - (obs.mean_direction - psi_ref));
      hist[std::min(kBins - 1, static_cast<int>(alpha / (kTwoPi / kBins)))] += 1.0;
    }
    double l1 = 0.0;
    const int per_bin = grid.n / kBins;
    for (int b = 0; b < kBins; ++b) {
      double ref = 0.0;
      for (int j = 0; j < per_bin; ++j) ref += gvm.phi[b * per_bin + j] * grid.weight;
      l1 += std::abs(hist[b] / sys.n - ref);
    }
    std::printf("ibm: histogram-vs-equilibrium L1 distance %.4f\n", l1);
    auto rep = open_output(join_path(common.out_dir, "ibm_equilibrium.txt"), cfg, common,
                           "ibm");
    rep << "l1_distance=" << num(l1) << "\n";
    rc = l1 < 0.05 ? 0 : 1;
  }
  return rc;
}

int cmd_hydro(const RunConfig& cfg, const CommonOptions& common) {
  cfg.check_known({"model", "recipe", "nx", "ny", "lx", "ly", "d", "n_theta", "w_max", "n_w",
                   "dt", "t_end", "amplitude", "y0", "zeta", "sigma_w"});
  const std::string model = cfg.get_string("model", "sohr_s");
  const std::string recipe = cfg.get_string("recipe", "fixed_point");
  const int nx = static_cast<int>(cfg.get_int("nx", 1024));
  const int ny = static_cast<int>(cfg.get_int("ny", 1));
  const double lx = cfg.get_double("lx", kTwoPi);
  const double ly = cfg.get_double("ly", kTwoPi);
  const double dv = cfg.get_double("d", 1.0);
  const int n_theta = static_cast<int>(cfg.get_int("n_theta", 512));
  const double dt = cfg.get_double("dt", 2e-3);
  const double t_end = cfg.get_double("t_end", 10.0);
  const double amplitude = cfg.get_double("amplitude", 1e-4);
  const auto grid = periodic_grid(n_theta);
  NoiseParam d(dv);

  auto report = open_output(join_path(common.out_dir, "hydro_report.txt"), cfg, common,
                            "hydro");

  if (model == "sohr_s" || model == "soh" || model == "reduced") {
    HydroStateS s;
    s.grid = HydroGrid{nx, ny, lx, ly};
    s.c1 = c1(d);
    s.c2 = c2(d, grid);
    s.d = dv;
    const int cells = s.grid.cells();
    s.rho.assign(cells, 1.0);
    s.rho_y.assign(cells, cfg.get_double("y0", 0.0));
    s.phi.assign(cells, 0.0);
    ReducedCoeffs rc;
    double zeta = 0.0;
    if (model == "reduced") {
      const auto pert = solve_perturbations(d, grid);
      const auto sz = small_zeta_coeffs(d, pert);
      rc = ReducedCoeffs{s.c2, sz.c3, sz.c4, c5(d, grid), sz.c6};
      zeta = cfg.get_double("zeta", 0.1);
    }
    if (recipe == "wave_speed") {
      if (ny != 1) throw ConfigError("hydro: wave_speed recipe is one-dimensional");
      for (int i = 0; i < nx; ++i) {
        const double x = lx / nx * i;
        s.rho[i] = 1.0 + amplitude * std::cos(kTwoPi / lx * x);
        s.phi[i] = amplitude * std::cos(kTwoPi / lx * x);
      }
    } else if (recipe != "fixed_point") {
      throw ConfigError("hydro: recipe must be fixed_point or wave_speed for this model");
    }
    const auto initial = s;
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    try {
      for (int q = 0; q < steps; ++q) {
        if (model == "sohr_s") step_sohr_s(s, dt);
        else if (model == "soh") step_soh(s, dt);
        else step_reduced(s, zeta, rc, dt);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("hydro: ") + e.what());
    }
    const double mass0 = total_mass(initial);
    const double mass1 = total_mass(s);
    report << "mass_drift=" << num(std::abs(mass1 - mass0) / mass0) << "\n";
    double state_drift = 0.0;
    for (int i = 0; i < cells; ++i) {
      state_drift = std::max(state_drift, std::abs(s.rho[i] - initial.rho[i]));
      state_drift = std::max(state_drift, std::abs(wrap_pm_pi(s.phi[i] - initial.phi[i])));
    }
    report << "state_drift=" << num(state_drift) << "\n";
    if (ny == 1) {
      auto snap = open_output(join_path(common.out_dir, "hydro_final.csv"), cfg, common,
                              "hydro");
      snap << "x,rho,rho_y,phi\n";
      for (int i = 0; i < nx; ++i) {
        snap << num(lx / nx * i) << ',' << num(s.rho[i]) << ',' << num(s.rho_y[i]) << ','
             << num(s.phi[i]) << "\n";
      }
    } else {
      save_state_2d(s, join_path(common.out_dir, "hydro_final.bin"),
                    std::string(kArtifactVersion) + " cmd=hydro");
    }
    if (recipe == "fixed_point") {
      const bool ok = state_drift < 1e-12;
      report << "fixed_point: " << (ok ? "PASS" : "FAIL") << "\n";
      std::printf("hydro %s fixed_point drift %.3e -> %s\n", model.c_str(), state_drift,
                  ok ? "PASS" : "FAIL");
      return ok ? 0 : 1;
    }
    std::printf("hydro %s wave run complete; final snapshot written\n", model.c_str());
    return 0;
  }

  if (model == "sohr_l") {
    const double w_max = cfg.get_double("w_max", 10.0);
    const int n_w = static_cast<int>(cfg.get_int("n_w", 64));
    const double sigma_w = cfg.get_double("sigma_w", 1.0);
    const auto table = build_table(d, w_max, n_w, grid, !common.serial);
    const auto rho0 = gaussian_density(w_max, n_w, sigma_w, 1.0);
    HydroStateL s;
    s.grid = HydroGrid{nx, 1, lx, 1.0};
    s.n_w = n_w;
    s.w_max = w_max;
    s.table = &table;
    s.phi.assign(nx, 0.0);
    s.rho_w.resize(static_cast<size_t>(nx) * n_w);
    for (int i = 0; i < nx; ++i) {
      for (int k = 0; k < n_w; ++k) s.rho_w[static_cast<size_t>(i) * n_w + k] = rho0.values[k];
    }
    const auto initial = s;
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    try {
      for (int q = 0; q < steps; ++q) step_sohr_l(s, dt);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("hydro: ") + e.what());
    }
    double state_drift = 0.0;
    for (int i = 0; i < nx; ++i) {
      state_drift = std::max(state_drift, std::abs(wrap_pm_pi(s.phi[i] - initial.phi[i])));
    }
    for (size_t i = 0; i < s.rho_w.size(); ++i) {
      state_drift = std::max(state_drift, std::abs(s.rho_w[i] - initial.rho_w[i]));
    }
    report << "state_drift=" << num(state_drift) << "\n";
    const bool ok = state_drift < 1e-12;
    report << "fixed_point: " << (ok ? "PASS" : "FAIL") << "\n";
    std::printf("hydro sohr_l fixed_point drift %.3e -> %s\n", state_drift,
                ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
  }
  throw ConfigError("hydro: unknown model '" + model + "'");
}

int cmd_dispersion(const RunConfig& cfg, const CommonOptions& common) {
  cfg.check_known({"d", "w_max", "n_w", "n_theta", "sigma_w", "xi", "theta"});
  const double dv = cfg.get_double("d", 1.0);
  const double w_max = cfg.get_double("w_max", 10.0);
  const int n_w = static_cast<int>(cfg.get_int("n_w", 64));
  const int n_theta = static_cast<int>(cfg.get_int("n_theta", 512));
  const double sigma_w = cfg.get_double("sigma_w", 1.0);
  const auto xis = cfg.get_list("xi", {0.5, 1.0, 2.0, 4.0});
  const auto thetas = cfg.get_list(
      "theta", {0.0, kTwoPi / 16, kTwoPi / 8, 3 * kTwoPi / 16, kTwoPi / 4});

  const auto grid = periodic_grid(n_theta);
  const auto table = build_table(NoiseParam(dv), w_max, n_w, grid, !common.serial);
  const auto rho0 = gaussian_density(w_max, n_w, sigma_w, 1.0);
  const auto rep = stability_scan(table, rho0, xis, thetas);

  auto out = open_output(join_path(common.out_dir, "dispersion_scan.csv"), cfg, common,
                         "dispersion");
  out << "xi,theta,root_re,root_im,residual,flags\n";
  for (const auto& row : rep.rows) {
    out << num(row.xi) << ',' << num(row.theta) << ',' << num(row.mu.real()) << ','
        << num(row.mu.imag()) << ',' << num(row.residual) << ','
        << (row.resonant ? "resonant" : "") << "\n";
  }
  std::printf("dispersion: %zu roots, max |Im mu| (non-resonant) = %.3e -> %s\n",
              rep.rows.size(), rep.max_im_abs, rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 1;
}

int cmd_validate(const RunConfig& cfg, const CommonOptions& common) {
  cfg.check_known({"tags", "threads"});
  std::vector<std::string> tags;
  if (cfg.has("tags")) {
    std::istringstream ss(cfg.require_string("tags"));
    std::string field;
    while (std::getline(ss, field, ',')) tags.push_back(field);
    const auto known = acceptance_criteria({});
    for (const auto& t : tags) {
      const bool ok = std::any_of(known.begin(), known.end(),
                                  [&](const Criterion& c) { return c.tag == t; });
      if (!ok) throw ConfigError("validate: unknown tag '" + t + "'");
    }
  }
  AcceptanceOptions opts;
  opts.threads = common.serial ? 1 : static_cast<int>(cfg.get_int("threads", 0));
  std::string csv;
  const bool pass = run_acceptance(opts, tags, &csv);
  auto out = open_output(join_path(common.out_dir, "validate_report.csv"), cfg, common,
                         "validate");
  out << csv;
  return pass ? 0 : 1;
}

}  // namespace sohr
