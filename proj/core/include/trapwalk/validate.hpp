#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace trapwalk {

struct CheckResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;  // first failing comparison, or a summary statistic
};

struct ValidationCheck {
  std::string name;
  std::function<CheckResult(std::uint64_t seed)> run;  // fills name/pass/detail
};

// Fast cross-module consistency checks (closed forms vs dense solvers,
// samplers vs exact laws, phase identities). Each runs in well under a
// second; stochastic ones are deterministic given the seed.
const std::vector<ValidationCheck>& validation_checks();

// Runs every check whose name contains `filter` (empty matches all),
// filling per-check wall time.
std::vector<CheckResult> run_validation(const std::string& filter, std::uint64_t seed);

}  // namespace trapwalk
