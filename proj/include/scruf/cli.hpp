#pragma once

#include <ostream>

namespace scruf {

// Entry point behind the `scruf` binary: generate | run | sweep | report.
// Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scruf
