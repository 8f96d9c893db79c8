#pragma once

#include <ostream>

namespace longmem::cli {

/// Runs one `longmem` invocation. Returns 0 on success, 1 on invalid input
/// (bad flags, failed preconditions), 2 on runtime failure.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace longmem::cli
