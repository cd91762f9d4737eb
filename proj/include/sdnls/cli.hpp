#pragma once

#include <iosfwd>

namespace sdnls {

/// Entry point behind the sdnls executable. Subcommands: run, suite,
/// nash-bench, ode-oracle, sweep. Returns 0 iff every asserted check passed.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdnls
