#pragma once

#include <iosfwd>

namespace mutakill {

/// Full command-line driver. Returns the process exit code: 0 on success
/// (monotonicity violations are findings, not failures), 1 for usage
/// errors, 2 for data-format errors, 3 for internal failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mutakill
