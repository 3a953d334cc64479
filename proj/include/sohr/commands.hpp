#pragma once

#include <string>

#include "sohr/config.hpp"

// CLI command backends. Each writes its outputs under `out_dir` and returns
// a process exit code: 0 success, 1 validation failure. Configuration errors
// throw ConfigError (mapped to exit code 2 by the driver).

namespace sohr {

inline constexpr const char* kArtifactVersion = "sohr-lab 0.1.0";

struct CommonOptions {
  std::string out_dir = ".";
  bool serial = false;
  unsigned long long seed = 1;
};

int cmd_coeffs(const RunConfig& cfg, const CommonOptions& common);
int cmd_profiles(const RunConfig& cfg, const CommonOptions& common);
int cmd_ibm(const RunConfig& cfg, const CommonOptions& common);
int cmd_hydro(const RunConfig& cfg, const CommonOptions& common);
int cmd_dispersion(const RunConfig& cfg, const CommonOptions& common);
int cmd_validate(const RunConfig& cfg, const CommonOptions& common);

}  // namespace sohr
