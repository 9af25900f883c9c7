#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kteka::cli {

/// Exit codes of cmd_dispatch().
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumeric = 2;

/// Runs one tool invocation. `args` excludes the program name.
///
/// Subcommands: gen {cbf, rosette}, average, classify, posterior, denoise,
/// spectra. `--from-manifest FILE` replays the argument list recorded in a
/// manifest; arguments given alongside it are appended and win over the
/// recorded ones.
int cmd_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kteka::cli
