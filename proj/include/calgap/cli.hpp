#pragma once

#include <iosfwd>

namespace calgap {

inline constexpr int kExitOk = 0;
inline constexpr int kExitClaimsViolated = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `calgap` tool; returns the process exit status.
/// Subcommands: gen, train, metrics, decompose, check-claims.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace calgap
