#include <cstdio>

#include "sohr/acceptance.hpp"

int main() {
  sohr::AcceptanceOptions opts;
  const bool pass = sohr::run_acceptance(opts, {});
  std::printf("acceptance: %s\n", pass ? "ALL PASS" : "FAILURES PRESENT");
  return pass ? 0 : 1;
}
