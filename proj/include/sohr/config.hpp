#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Plain-text key=value run configuration. '#' starts a comment; keys may be
// dotted for namespacing. Every command validates its keys against an
// allow-list, so typos fail fast instead of silently using defaults.

namespace sohr {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class RunConfig {
 public:
  static RunConfig from_file(const std::string& path);
  // Parses "key=value" tokens (CLI overrides).
  static RunConfig from_tokens(const std::vector<std::string>& tokens);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void merge(const RunConfig& overrides);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list of reals.
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;

  // Throws ConfigError when a stored key is not in `allowed`.
  void check_known(const std::vector<std::string>& allowed) const;

  // Sorted key=value lines; parse(serialize()) round-trips exactly.
  std::string serialize() const;

  const std::map<std::string, std::string>& items() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace sohr
