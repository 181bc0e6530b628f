#pragma once

#include <ostream>

namespace pedmap {

/// Runs the command-line interface. `out` receives primary output when no
/// output file is given; `err` receives diagnostics. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pedmap
