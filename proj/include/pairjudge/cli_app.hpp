#pragma once

#include <string>
#include <vector>

namespace pairjudge {

/// Process exit codes. Distinct classes so scripts can react: bad flags or
/// input files (2) need a human, transport failures (3) are retryable,
/// assertion failures (4) mean a property the run was asked to enforce does
/// not hold, and partial results (5) mean outputs exist but are incomplete.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternalError = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitTransportError = 3;
inline constexpr int kExitAssertionFailed = 4;
inline constexpr int kExitPartialResults = 5;

/// Runs the command-line interface. `args` excludes the program name.
int run_cli(std::vector<std::string> args);

/// Every long-form flag the CLI accepts (sorted, "--" included), across all
/// subcommands. The documentation checker validates doc pages against this.
std::vector<std::string> cli_flag_registry();

}  // namespace pairjudge
