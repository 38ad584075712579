#pragma once

#include <iosfwd>

namespace skillrt::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point behind the skillrt executable: 2 for usage or configuration
// errors, 1 for runtime failures, 0 on success.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skillrt::app
