#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace rose_dyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name. Data goes to `out`,
/// diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Worker count for batch jobs: ROSE_DYN_THREADS if set and positive,
/// otherwise the hardware concurrency (at least 1).
unsigned batch_threads();

}  // namespace rose_dyn::cli
