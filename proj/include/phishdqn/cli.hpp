#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phishdqn::cli {

/// Process exit codes. CLI11 usage errors (unknown flags, failed
/// validation) surface with CLI11's own codes, which start above this
/// range.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPhishing = 1;  // classify verdict only
inline constexpr int kExitIo = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitDiverged = 4;
inline constexpr int kExitIncompatibleModel = 5;

/// Runs one command. `args` excludes the program name. Machine-readable
/// JSON goes to `out`; human-readable progress and tables go to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace phishdqn::cli
