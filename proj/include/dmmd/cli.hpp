#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace dmmd::cli {

// 0 success, 1 numerical or verification failure, 2 usage or input error.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Entry point shared by the dmmd executable and the in-process tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
};

struct SuiteMax {
  double residual = 0.0;
  std::uint64_t instance_seed = 0;
  std::string dims;
};

struct VerifyReport {
  SuiteMax lemma1;
  SuiteMax lemma2;
  SuiteMax lemma3;
  SuiteMax laplacian_oracle;  // max |w (L_v - L_w) - M_c| entrywise
  bool passed = false;
};

/// Random-instance checks of the scatter and MMD identities. Instance t
/// uses seed + t, so any failure can be replayed with --trials 1.
VerifyReport verify_identities(const VerifyOptions& opts);

}  // namespace dmmd::cli
