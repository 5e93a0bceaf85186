#pragma once

#include <iosfwd>

namespace stegocap::cli {

// Exit codes of the stegocap command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCapacity = 2;
inline constexpr int kExitBackend = 3;
inline constexpr int kExitExtraction = 4;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stegocap::cli
