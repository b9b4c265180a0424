#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Randomized verification suite driving the cocycle identities, invariance
// properties, cross-formula comparisons and utility roundtrips.  Used by the
// command line `verify` and by the acceptance tests.

namespace volflow {

struct CheckResult {
  std::string name;
  int trials = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double millis = 0.0;
};

struct SuiteOptions {
  std::vector<int> sizes = {2, 3, 4, 5};
  int trials = 200;
  std::uint64_t seed = 0;
  std::optional<double> tol_override;  // replaces each check's default tolerance
  int threads = 1;
};

std::vector<CheckResult> run_verify_suite(const SuiteOptions& opts);

bool all_pass(const std::vector<CheckResult>& results);

std::string suite_to_json(const std::vector<CheckResult>& results);
std::string suite_to_csv(const std::vector<CheckResult>& results);
std::string suite_to_text(const std::vector<CheckResult>& results);

// Parallelism cap from VOLFLOW_THREADS (>= 1); defaults to 1.
int env_thread_cap();

}  // namespace volflow
