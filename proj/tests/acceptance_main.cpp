// Acceptance suite runner: one pass/fail line per criterion; nonzero exit on
// any failure. Also reachable as `ubw1 selftest` through the shared library.

#include <cstdio>

#include "selftest.hpp"

int main() {
  int failures = ubw1::run_acceptance(stdout);
  return failures == 0 ? 0 : 1;
}
