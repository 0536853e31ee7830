#pragma once

#include <iosfwd>

namespace gpsobolev::cli {

// Exit codes of `analyze`; other commands return 0 or kExitError.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 10;
inline constexpr int kExitInconclusive = 11;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpsobolev::cli
