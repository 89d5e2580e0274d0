#pragma once

#include <string>
#include <vector>

namespace lsv {

struct SuiteResult {
  std::string name;
  bool passed;
  std::string detail;
  double wall_ms;
};

// Quick invariant suites across all modules (small grids, few samples).
std::vector<SuiteResult> run_selftest(unsigned workers = 0);

}  // namespace lsv
