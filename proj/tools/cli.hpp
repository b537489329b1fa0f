#pragma once

#include <ostream>

namespace georef::cli {

/// Runs the command line; returns the process exit code (0 ok, 2 no anchors, 3 bad input or usage).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace georef::cli
