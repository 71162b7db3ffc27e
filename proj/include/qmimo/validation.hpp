#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qmimo {

struct CheckResult {
  std::string name;
  double measured = 0;   // the statistic the check thresholds
  double tolerance = 0;  // pass iff measured <= tolerance
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// Cross-implementation and statistical self-checks. Each is deterministic in
// its seed. fault_scale on the estimator check perturbs the fast path output
// before comparison; tests use it to prove the check can fail.
CheckResult check_dense_fast_equivalence(std::uint64_t seed, int instances = 100,
                                         double fault_scale = 0.0);
CheckResult check_rate_rearrangement(std::uint64_t seed, int instances = 1000);
CheckResult check_perfect_csi_limit(std::uint64_t seed, int instances = 1000);
CheckResult check_observation_covariance(std::uint64_t seed, int blocks = 10000);
CheckResult check_quantizer_covariance(std::uint64_t seed, int draws = 100000);
CheckResult check_estimator_moments(std::uint64_t seed, int trials = 20000);
CheckResult check_combiner_residual(std::uint64_t seed, int draws = 100000);

ValidationReport run_validation(std::uint64_t seed);
std::string report_to_json(const ValidationReport& report);

}  // namespace qmimo
