#pragma once

// Randomized invariant suite behind `edmp verify`. Instances are generated
// from per-instance seeds, so the summary does not depend on thread count.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edmp/perturbation.hpp"

namespace edmp {

struct VerifyOptions {
  int count = 100;
  std::uint64_t seed = 42;
  int nmax = 8;
  bool corrupt = false;  // negative control: perturb the first instance
  int threads = 0;       // 0: hardware concurrency
};

struct CheckFailure {
  int instance = 0;
  std::uint64_t seed = 0;
  std::string check;
  std::string detail;
};

/// Per-check tallies; a check is one named property on one instance.
struct CheckTally {
  int run = 0;
  int failed = 0;
};

struct VerifySummary {
  int instances = 0;
  int checks_run = 0;
  int checks_failed = 0;
  std::map<std::string, CheckTally> by_check;
  /// Case tag of each instance's designated entry.
  std::map<std::string, int> case_counts;
  /// Case tags over every entry of every instance.
  std::map<std::string, int> entry_case_counts;
  bool coverage_enforced = false;
  bool coverage_ok = true;
  std::vector<CheckFailure> failures;  // first few, in instance order

  bool passed() const { return checks_failed == 0 && (!coverage_enforced || coverage_ok); }
};

/// Instances needed per case tag before coverage is enforced.
inline constexpr int kCoveragePerTag = 5;

VerifySummary run_verify(const VerifyOptions& options);

}  // namespace edmp
