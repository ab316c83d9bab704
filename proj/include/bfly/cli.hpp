#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bfly {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point of the `bfly` tool. args excludes the program name.
/// Returns 0 on success, 1 on argument errors, 2 on numerical failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace bfly
