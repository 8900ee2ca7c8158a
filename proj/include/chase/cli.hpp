#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace chase {

/// One invariant suite's outcome.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Knobs shared by `chase check` and the acceptance harness, which runs the
/// same suites at larger sizes.
struct CheckOptions {
  std::uint64_t seed = 1;
  double tol = 1e-6;               // solver tolerance for every handle
  double perturb_conjugate = 0.0;  // fault injection: offset added to conjugate
                                   // values inside the fenchel suite only
  int probes = 1000;               // probes per work-function property
  int instances = 3;               // fixtures per suite where several are used
  int dual_dirs = 200;             // directions per instance, dual-bound suite
  int steiner_samples = 2048;      // estimator size for the agreement suites
  double oracle_grid = 0.01;       // grid step for the brute-force oracle suite
};

/// Names of the invariant suites, in execution order.
const std::vector<std::string>& check_suite_names();

/// Run one suite by name; ValidationError for an unknown name.
CheckResult run_check_suite(const std::string& name, const CheckOptions& opt);

/// Entry point of the `chase` tool (subcommands: run, check, growth) writing
/// to the given streams.  Exit codes: 0 success, 1 failed checks, 2
/// validation or usage errors, 3 solver failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chase
