#pragma once

#include <iosfwd>

namespace radmon::cli {

// Dispatches one verb. Exit codes: 0 success, 1 usage, 2 file I/O,
// 3 validation. Normal output goes to `out`; CLI11 errors go to stderr.
int run(int argc, const char* const* argv, std::ostream& out);

}  // namespace radmon::cli
