#pragma once

#include <ostream>

namespace dcor::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitInfeasible = 2,
    kExitNumerical = 3,
};

/// Entry point of the `dcor` tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Asks a running optimization to stop after its current iteration and still
/// write its artifacts. Safe to call from a signal handler.
void request_stop() noexcept;

} // namespace dcor::cli
