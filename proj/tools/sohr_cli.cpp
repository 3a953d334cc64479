#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sohr/commands.hpp"
#include "sohr/config.hpp"

// Command-line driver. Exit codes: 0 success, 1 validation failure,
// 2 configuration error.

namespace {

struct SubArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, SubArgs& args, sohr::CommonOptions& common) {
  sub->add_option("--config", args.config_path, "plain-text key=value configuration file");
  sub->add_option("--set", args.overrides, "inline override, key=value (repeatable)");
  sub->add_option("--out", common.out_dir, "output directory");
  sub->add_flag("--serial", common.serial, "force deterministic single-threaded mode");
  sub->add_option("--seed", common.seed, "master RNG seed");
}

sohr::RunConfig assemble(const SubArgs& args) {
  sohr::RunConfig cfg;
  if (!args.config_path.empty()) cfg = sohr::RunConfig::from_file(args.config_path);
  cfg.merge(sohr::RunConfig::from_tokens(args.overrides));
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sohr: alignment hydrodynamics with self-rotation, numerical laboratory"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const sohr::RunConfig&, const sohr::CommonOptions&);
    SubArgs args;
    sohr::CommonOptions common;
  };
  std::vector<Entry> entries = {
      {"coeffs", "tabulate the closure coefficients a1..a6 over W", sohr::cmd_coeffs, {}, {}},
      {"profiles", "emit equilibrium / collision-invariant profile CSVs", sohr::cmd_profiles,
       {}, {}},
      {"ibm", "run the stochastic particle model", sohr::cmd_ibm, {}, {}},
      {"hydro", "run a hydrodynamic solver recipe", sohr::cmd_hydro, {}, {}},
      {"dispersion", "scan the linearized dispersion relation", sohr::cmd_dispersion, {}, {}},
      {"validate", "run the acceptance matrix", sohr::cmd_validate, {}, {}},
  };
  for (auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, e.args, e.common);
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& e : entries) {
    if (!app.got_subcommand(e.name)) continue;
    try {
      return e.run(assemble(e.args), e.common);
    } catch (const sohr::ConfigError& err) {
      std::fprintf(stderr, "config error: %s\n", err.what());
      return 2;
    } catch (const std::exception& err) {
      std::fprintf(stderr, "error: %s\n", err.what());
      return 1;
    }
  }
  return 2;
}
