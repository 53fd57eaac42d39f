#pragma once

#include <string>
#include <vector>

namespace nilfourier {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;   // measured numbers, one line
  double seconds = 0.0;
};

/// Runs the full verification suite (numerical criteria plus the CLI
/// determinism / resumability checks, which need the path of the command
/// line binary; pass an empty string to report those as failures).
std::vector<CriterionResult> run_acceptance(const std::string& cli_path, int workers);

/// Prints one PASS/FAIL line per criterion; returns true when all pass.
bool report_acceptance(const std::vector<CriterionResult>& results);

}  // namespace nilfourier
