#pragma once

#include <functional>
#include <string>
#include <vector>

// Validation matrix: every cross-level consistency requirement of the
// laboratory as one pass/fail criterion with pinned tolerances. Used by both
// the ctest acceptance binary and the `validate` CLI subcommand.

namespace sohr {

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string name;
  std::string tag;
  std::function<CriterionResult()> run;
};

struct AcceptanceOptions {
  int threads = 0;  // 0: hardware concurrency
};

std::vector<Criterion> acceptance_criteria(const AcceptanceOptions& opts);

// Runs all criteria whose tag is in `tags` (empty: all), printing one line
// per criterion to stdout. Returns true when everything passed.
bool run_acceptance(const AcceptanceOptions& opts, const std::vector<std::string>& tags,
                    std::string* csv_report = nullptr);

}  // namespace sohr
