// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Criterion 9 invokes the command line binary;
// its path comes from NILFOURIER_CLI (set by ctest) or --cli.
#include <cstdlib>
#include <cstring>
#include <string>

#include "nilfourier/acceptance.hpp"

int main(int argc, char** argv) {
  std::string cli;
  int workers = 1;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc) cli = argv[++i];
    if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) workers = std::atoi(argv[++i]);
  }
  if (cli.empty()) {
    const char* env = std::getenv("NILFOURIER_CLI");
    if (env) cli = env;
  }
  auto results = nilfourier::run_acceptance(cli, workers);
  return nilfourier::report_acceptance(results) ? 0 : 1;
}
