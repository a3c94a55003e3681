#pragma once

#include <iosfwd>

namespace foldgan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Subcommands: simulate, fold, train-gan, generate, evaluate, report,
/// render. Returns 0 on success, 1 on a usage error, 2 on a runtime error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace foldgan::cli
