#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bisep {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Self-checks run by `bisep verify`: structure-function oracle, restricted
// SVD against a dense SVD, noiseless exact recovery, rank-1 Wedin dominance
// and stability of the sparse-block noise constant.
std::vector<CheckResult> run_verification(std::uint64_t seed = 7);

}  // namespace bisep
