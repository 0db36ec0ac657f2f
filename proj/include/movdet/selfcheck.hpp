#pragma once

#include <string>
#include <vector>

namespace movdet {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed;
  std::string detail;  ///< worst deviation, or reproduction parameters on failure
};

/// Reduced-size run of every module's invariants. Deterministic.
std::vector<CheckResult> run_selfcheck(unsigned threads = 1);

}  // namespace movdet
