#pragma once

namespace cisjac {

// Entry point of the command-line tool.  Exit codes: 0 success, 1 failed
// validation or tolerance, 2 usage/parse errors, 3 numeric failures.
int run_cli(int argc, const char* const* argv);

}  // namespace cisjac
