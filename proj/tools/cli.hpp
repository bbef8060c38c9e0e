#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace slowpass::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Entry point shared by the binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat "key = value" config; '#' starts a comment line. Throws UsageError
/// on malformed lines and duplicate keys.
std::map<std::string, std::string> parse_config(std::istream& is);

/// "ln2/N" or a plain decimal.
double parse_ratio(const std::string& text);

} // namespace slowpass::cli
