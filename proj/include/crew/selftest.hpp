#ifndef CREW_SELFTEST_HPP_
#define CREW_SELFTEST_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace crew {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Branch-and-bound against exhaustive enumeration on random 0/1 programs.
CheckResult check_solver_oracle(int instances, std::uint64_t seed);

// buffer_days, penalty, and step/terminal rewards on hand-built instances,
// compared exactly.
CheckResult check_unit_values();

// Analytic gradients of log pi(a|s) and V(s) against central differences on
// env observations. Every parameter is probed when sample_per_layer <= 0,
// otherwise that many random entries per weight matrix and bias.
struct GradientCheckOptions {
  int observations = 20;
  int hidden = 16;
  int sample_per_layer = 0;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
};

struct GradientCheckResult {
  CheckResult result;
  double worst_actor = 0.0;   // largest relative error seen
  double worst_critic = 0.0;
  long probes = 0;
};

GradientCheckResult check_gradients(const GradientCheckOptions& opts);

// All of the above with default sizes.
std::vector<CheckResult> run_selftest(std::uint64_t seed);

}  // namespace crew

#endif  // CREW_SELFTEST_HPP_
