// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. The same checks back the CLI's `verify` subcommand.

#include <cstdio>

#include "locklab/verify.hpp"

int main() {
  const auto checks = locklab::run_acceptance_checks();
  bool all_pass = true;
  for (const locklab::CheckResult& c : checks) {
    all_pass = all_pass && c.pass;
    std::printf("[%s] criterion %d: %s | expected %s | got %s | tol %s\n",
                c.pass ? "PASS" : "FAIL", c.id, c.label.c_str(), c.expected.c_str(),
                c.got.c_str(), c.tolerance.c_str());
  }
  std::printf("%s (%zu criteria)\n", all_pass ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              checks.size());
  return all_pass ? 0 : 1;
}
