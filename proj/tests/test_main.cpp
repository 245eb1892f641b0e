#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <iostream>

#include "calgap/decomposition.hpp"

// Every decomposition_report built anywhere in the suite is tallied; a single
// identity failure fails the run even if the test that produced it passed.
int main(int argc, char **argv) {
  doctest::Context context(argc, argv);
  const int status = context.run();
  if (context.shouldExit()) return status;
  const auto audit = calgap::decomposition_audit();
  std::cout << "decomposition reports: " << audit.reports
            << ", identity failures: " << audit.identity_failures << '\n';
  if (audit.identity_failures != 0) return 1;
  return status;
}
