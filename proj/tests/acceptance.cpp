// One pass/fail line per acceptance criterion; exit status 1 when any fails.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "psh/acceptance.hpp"

int main(int argc, char** argv) {
  psh::AcceptanceOptions opt;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--serial") opt.mode = psh::Exec::serial;
    else if (a == "--seed" && i + 1 < argc) opt.seed = std::strtoull(argv[++i], nullptr, 10);
    else if (a == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  int failed = 0;
  for (const auto& info : psh::acceptance_criteria()) {
    if (only && info.id != only) continue;
    const auto o = psh::run_criterion(info.id, opt);
    const bool pass = o.verdict() != psh::Verdict::fail;
    if (!pass) ++failed;
    std::printf("criterion %2d: %s  %s (%.1fs)\n", info.id, pass ? "PASS" : "FAIL", info.title, o.seconds);
    for (const auto& c : o.checks)
      if (c.verdict == psh::Verdict::fail)
        std::printf("    failed: %s value=%.6g bound=%.6g at %s\n", c.id.c_str(), c.value, c.bound, c.locator.c_str());
    if (!o.error.empty()) std::printf("    error: %s\n", o.error.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
