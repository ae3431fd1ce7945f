#pragma once

#include <iosfwd>

namespace jdd::cli {

/// Parses argv and runs one subcommand. Returns 0 on success, 1 on a usage
/// or validation error, 2 on a runtime failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jdd::cli
