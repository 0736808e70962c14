#pragma once

// The bundled verification suite: exactly-derivable numbers where closed
// forms exist, property checks elsewhere. `quick` caps resolutions for a
// sub-five-minute smoke run; `full` runs the stated resolutions.

#include <iosfwd>
#include <string>
#include <vector>

namespace hlw {

struct CriterionResult {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  bool all_pass = false;
  double total_seconds = 0.0;
};

std::vector<std::string> acceptance_criterion_ids();

// Runs every criterion; failures become report entries, never exceptions.
// Progress lines (one per criterion) go to `progress` when given.
AcceptanceReport run_acceptance(bool quick, std::ostream* progress = nullptr);

}  // namespace hlw
