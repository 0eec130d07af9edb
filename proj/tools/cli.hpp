#pragma once

#include <iosfwd>

namespace birkhoff::cli {

/// Exit codes: 0 success, 1 check or solve failure, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace birkhoff::cli
