#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace semrel::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240101;

// Runs one subcommand (features, train, predict, eval, fit-pca). `args`
// excludes the program name. Returns the process exit code: 0 success,
// 2 usage or configuration, 3 data, 4 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semrel::cli
