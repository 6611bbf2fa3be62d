#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace novas {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (simulate, calibrate, forecast, evaluate, cwtest).
/// `args` excludes the program name. Diagnostics are a single line on `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat `key = value` config file as `--key=value` tokens. Blank lines and
/// lines starting with '#' are skipped. Throws FormatError on other lines
/// without '='.
std::vector<std::string> config_tokens(const std::string& path);

} // namespace novas
