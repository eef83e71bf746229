// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace certlab {

enum class VerifyLevel { quick, full };

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // slack left in the checked inequality (>= 0 when passing)
  std::string detail;
};

/// Runs the statistical and exact verification battery across all modules.
/// Quick level caps Monte Carlo at 1e4 samples and tensor powers at d^n <=
/// 128. `inject_fault` flips the outcome of the named check (negative
/// control for the harness itself).
std::vector<CheckResult> run_battery(std::uint64_t seed, VerifyLevel level,
                                     const std::string& inject_fault = "");

}  // namespace certlab
