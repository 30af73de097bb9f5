#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nlfp/config.hpp"

namespace nlfp {

// Process exit codes of the command line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;           // bad config, unmet precondition
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitCheckFailed = 3;
inline constexpr int kExitIo = 4;

/// solve, verify-ball, study, diagnose
const std::vector<std::string>& subcommands();

/// Runs one subcommand. Artifacts go to the configured paths; the report goes
/// to `out` when no report path is set. Human-readable summaries go to `out`,
/// errors and timings to `err`. Never throws for library errors; they map to
/// exit codes.
int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace nlfp
