#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace turbmimo {

enum class FaultInjection {
  none,
  transfer_sign,  // flip the quadratic spectral phase of the Fresnel step
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// Fast self-contained property suite (seconds, not minutes): transform
// round-trips, free-space beam laws, screen statistics on a reduced grid,
// permanents against brute force, channel algebra.  The fault hook exists so
// the suite can prove it would catch a broken propagation kernel.
ValidationReport run_validation(std::uint64_t seed, FaultInjection fault = FaultInjection::none);

}  // namespace turbmimo
