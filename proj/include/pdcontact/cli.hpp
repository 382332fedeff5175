#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdcontact::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;         // bad arguments, I/O, malformed input, failed check
inline constexpr int kExitIterationCap = 2;  // solver stopped at max_outer
inline constexpr int kExitNan = 3;           // solver aborted on a non-finite iterate

/// Runs the command line `args` (without the program name). Every command
/// writes one JSON run manifest next to its main output.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdcontact::cli
