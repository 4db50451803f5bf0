#pragma once

#include <ostream>

namespace mcgraph {

/// Entry point of the `mcgraph` command line tool (subcommands run,
/// check-serrin, estimates, sweep). Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace mcgraph
