#pragma once

#include <iosfwd>

namespace wkit {

// Entry point of the `wkit` tool. Exit codes: 0 success, 1 numeric
// failure, 2 input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wkit
