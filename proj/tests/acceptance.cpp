// Runs the ten acceptance suites and prints one PASS/FAIL line per criterion.
// With --verbose every metric is listed under its criterion.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "arnold/checks.hpp"

int main(int argc, char** argv) {
  const bool verbose = argc > 1 && std::strcmp(argv[1], "--verbose") == 0;
  bool all = true;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& r : arnold::checks::run_all()) {
    const auto& w = r.worst();
    std::printf("criterion %2d %-22s %s  (%zu metrics; worst %s=%.3g tol=%.3g)\n", r.id, r.name.c_str(),
                r.pass() ? "PASS" : "FAIL", r.metrics.size(), w.key.c_str(), w.value, w.tol);
    if (verbose) {
      for (const auto& m : r.metrics) {
        std::printf("    %s=%.6g tol=%s%.3g %s\n", m.key.c_str(), m.value, m.at_least ? ">=" : "<", m.tol,
                    m.pass() ? "PASS" : "FAIL");
      }
    }
    all = all && r.pass();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("acceptance: %s in %.1f s\n", all ? "all criteria PASS" : "FAILURES", secs);
  return all ? 0 : 1;
}
