#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fintime {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitUsage = 2;

/// Flags each subcommand accepts (without --help), as listed in its help text.
std::vector<std::string> documented_flags(std::string_view subcommand);

/// Entry point behind the `fintime` executable. argv[0] is the program name.
int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fintime
