#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skewgibbs::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point behind the `skewgibbs` binary. args excludes the program
/// name. Subcommands: gen-data, fit, study, summarize.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skewgibbs::io
