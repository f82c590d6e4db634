// Acceptance suite: runs every verification check at the reference scale
// (or the reduced quick profile) and prints one PASS/FAIL line per check.
// Exit status is nonzero if any check fails.

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "traceback/acceptance.hpp"

int main(int argc, char** argv) {
  traceback::VerifyOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      options.quick = true;
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      options.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
      options.workers = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--quick] [--seed N] [--workers N]\n";
      return 2;
    }
  }
  std::cout << "profile: " << (options.quick ? "quick (n=10^3, M=10^4, widened tolerances)"
                                             : "full (n=10^4, M=10^5)")
            << ", seed " << options.seed << "\n";
  const auto checks = traceback::run_verification(options);
  const int failures = traceback::print_verification(checks, std::cout);
  return failures == 0 ? 0 : 1;
}
