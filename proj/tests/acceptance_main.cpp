// Acceptance gate: one line per criterion, nonzero exit on any failure.
// HLW_ACCEPTANCE_LEVEL=quick caps resolutions for a fast smoke run.

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "hlw/acceptance.hpp"

int main(int argc, char** argv) {
  bool quick = false;
  const char* env = std::getenv("HLW_ACCEPTANCE_LEVEL");
  if (env && std::strcmp(env, "quick") == 0) quick = true;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

  std::cout << "acceptance level: " << (quick ? "quick" : "full") << "\n";
  hlw::AcceptanceReport report = hlw::run_acceptance(quick, &std::cout);
  std::cout << (report.all_pass ? "ALL PASS" : "FAILURES PRESENT") << " ("
            << report.total_seconds << "s total)\n";
  return report.all_pass ? 0 : 1;
}
