#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sdnsec::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFindings = 1;
inline constexpr int kUsage = 2;

// Environment variable naming a catalog file to use instead of the
// built-in one.
inline constexpr std::string_view kCatalogEnv = "SDNSEC_CATALOG";

// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdnsec::cli
