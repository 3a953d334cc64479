#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "sohr/commands.hpp"
#include "sohr/config.hpp"
#include "sohr/vmf.hpp"

using namespace sohr;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config parsing, overrides, round-trip") {
  const auto dir = temp_dir("sohr_cfg");
  const auto file = dir / "run.cfg";
  {
    std::ofstream out(file);
    out << "# sample configuration\n";
    out << "d = 1.0\n";
    out << "n_w=16   # trailing comment\n";
    out << "model = sohr_s\n";
  }
  auto cfg = RunConfig::from_file(file.string());
  CHECK(cfg.get_double("d", 0.0) == 1.0);
  CHECK(cfg.get_int("n_w", 0) == 16);
  CHECK(cfg.get_string("model", "") == "sohr_s");
  CHECK(cfg.get_double("absent", 7.5) == 7.5);

  cfg.merge(RunConfig::from_tokens({"d=2.5", "extra=yes"}));
  CHECK(cfg.get_double("d", 0.0) == 2.5);
  CHECK(cfg.get_string("extra", "") == "yes");

  // serialize -> parse is idempotent
  const auto text = cfg.serialize();
  const auto file2 = dir / "round.cfg";
  {
    std::ofstream out(file2);
    out << text;
  }
  const auto cfg2 = RunConfig::from_file(file2.string());
  CHECK(cfg2.serialize() == text);

  CHECK_THROWS_AS(cfg.check_known({"d", "n_w"}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_tokens({"novalue"}), ConfigError);
  CHECK_THROWS_AS(cfg.get_double("model", 0.0), ConfigError);
  CHECK_THROWS_AS((void)RunConfig::from_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("coeffs command: files, parity report, guard") {
  const auto dir = temp_dir("sohr_cmd_coeffs");
  CommonOptions common;
  common.out_dir = dir.string();
  RunConfig cfg = RunConfig::from_tokens({"d=1.0", "w_max=2", "n_w=8", "n_theta=64"});
  CHECK(cmd_coeffs(cfg, common) == 0);
  const auto csv = slurp(dir / "coeffs_d1.csv");
  CHECK(csv.find("w,a1,a2,a3,a4,a5,a6,c1_tilde,psi,lambda") != std::string::npos);
  const auto report = slurp(dir / "coeffs_report.txt");
  CHECK(report.find("parity: PASS") != std::string::npos);

  RunConfig bad = RunConfig::from_tokens({"d=1.0", "w_max=1e6"});
  CHECK_THROWS_WITH_AS(cmd_coeffs(bad, common), doctest::Contains("overflow guard"),
                       ConfigError);
  RunConfig unknown = RunConfig::from_tokens({"dd=1.0"});
  CHECK_THROWS_AS(cmd_coeffs(unknown, common), ConfigError);
}

TEST_CASE("profiles command: matrix files and the zero-rotation reference") {
  const auto dir = temp_dir("sohr_cmd_profiles");
  CommonOptions common;
  common.out_dir = dir.string();
  RunConfig cfg = RunConfig::from_tokens({"d=1.0", "w=0,1", "n_theta=64"});
  CHECK(cmd_profiles(cfg, common) == 0);
  CHECK(std::filesystem::exists(dir / "gvm_d1_w0.csv"));
  CHECK(std::filesystem::exists(dir / "gci_d1_w1.csv"));

  // The w = 0 profile equals the aligned equilibrium.
  const auto grid = periodic_grid(64);
  const auto vmf = vmf_profile(NoiseParam(1.0), grid);
  std::ifstream in(dir / "gvm_d1_w0.csv");
  std::string line;
  std::getline(in, line);  // parameter header
  std::getline(in, line);  // column names
  int j = 0;
  double sup = 0.0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double phi = std::strtod(line.c_str() + comma + 1, nullptr);
    sup = std::max(sup, std::abs(phi - vmf.values[j]));
    ++j;
  }
  CHECK(j == 64);
  CHECK(sup < 1e-10);

  RunConfig empty = RunConfig::from_tokens({"d=", "w=0"});
  CHECK_THROWS_AS(cmd_profiles(empty, common), ConfigError);
}

TEST_CASE("ibm command: smoke run is reproducible") {
  const auto dir1 = temp_dir("sohr_cmd_ibm1");
  const auto dir2 = temp_dir("sohr_cmd_ibm2");
  RunConfig cfg = RunConfig::from_tokens(
      {"n=200", "t_end=0.5", "dt=0.01", "radius=0.1", "diff=0.1", "law=s"});
  CommonOptions c1;
  c1.out_dir = dir1.string();
  c1.seed = 9;
  CommonOptions c2;
  c2.out_dir = dir2.string();
  c2.seed = 9;
  CHECK(cmd_ibm(cfg, c1) == 0);
  CHECK(cmd_ibm(cfg, c2) == 0);
  CHECK(slurp(dir1 / "ibm_final.csv") == slurp(dir2 / "ibm_final.csv"));
}

TEST_CASE("hydro command: fixed point and CFL rejection") {
  const auto dir = temp_dir("sohr_cmd_hydro");
  CommonOptions common;
  common.out_dir = dir.string();
  RunConfig cfg = RunConfig::from_tokens(
      {"model=sohr_s", "recipe=fixed_point", "nx=64", "t_end=0.05", "dt=0.002", "n_theta=64"});
  CHECK(cmd_hydro(cfg, common) == 0);

  RunConfig bad = RunConfig::from_tokens(
      {"model=sohr_s", "recipe=fixed_point", "nx=64", "t_end=0.05", "dt=0.5", "n_theta=64"});
  CHECK_THROWS_WITH_AS(cmd_hydro(bad, common), doctest::Contains("CFL"), ConfigError);
}

TEST_CASE("dispersion command: small scan passes") {
  const auto dir = temp_dir("sohr_cmd_disp");
  CommonOptions common;
  common.out_dir = dir.string();
  RunConfig cfg = RunConfig::from_tokens(
      {"d=1.0", "n_w=32", "w_max=6", "n_theta=128", "xi=1", "theta=0.785398163397448"});
  CHECK(cmd_dispersion(cfg, common) == 0);
  const auto csv = slurp(dir / "dispersion_scan.csv");
  CHECK(csv.find("xi,theta,root_re,root_im,residual,flags") != std::string::npos);
}

TEST_CASE("validate command rejects unknown tags") {
  const auto dir = temp_dir("sohr_cmd_validate");
  CommonOptions common;
  common.out_dir = dir.string();
  RunConfig cfg = RunConfig::from_tokens({"tags=nosuchtag"});
  CHECK_THROWS_AS(cmd_validate(cfg, common), ConfigError);
}

TEST_CASE("output files carry the parameter header") {
  const auto dir = temp_dir("sohr_cmd_hdr");
  CommonOptions common;
  common.out_dir = dir.string();
  RunConfig cfg = RunConfig::from_tokens({"d=1.0", "w=0", "n_theta=64"});
  CHECK(cmd_profiles(cfg, common) == 0);
  const auto text = slurp(dir / "gvm_d1_w0.csv");
  CHECK(text.rfind("# sohr-lab", 0) == 0);
  CHECK(text.find("d=1.0") != std::string::npos);
}
