#pragma once

#include "dmind/backend.hpp"

namespace dmind {

// Exit codes: one class per failure family, documented in --help.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitTransport = 4;
inline constexpr int kExitContract = 5;
inline constexpr int kExitInput = 6;

// Entry point behind main(). backend_override, when set, replaces whatever
// the flags would construct (test seam).
int run_cli(int argc, const char* const* argv, Backend* backend_override = nullptr);

}  // namespace dmind
