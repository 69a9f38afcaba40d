#pragma once

#include <ostream>

namespace nahm {

/// Command-line entry point. Returns 0 on success, 1 on invalid input and
/// 2 when a numerical procedure fails.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nahm
