#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace explore {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// fast paths against the slow reference implementations on random inputs:
// jps, dmp, distance field, frontier sets, qp, miqp and dynamics
std::vector<CheckResult> RunOracleSuite(uint64_t seed = 1);

// structural properties of the core and of short simulations
std::vector<CheckResult> RunInvariantSuite(uint64_t seed = 1);

}  // namespace explore
