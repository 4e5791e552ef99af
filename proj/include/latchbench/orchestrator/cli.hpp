#pragma once

#include <ostream>

namespace latchbench::orchestrator {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

/// Entry point of the `latchbench` command. Exit codes: 0 success, 1 partial
/// failure (some records errored or the run was interrupted), 2 config or
/// usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace latchbench::orchestrator
