#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pathlift::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kNumericalFailure = 2,
  kCheckFailure = 3,
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Reads PATHLIFT_SEED, falling back to kDefaultSeed.
std::uint64_t seed_from_environment();

/// Runs `pathlift <subcommand> --scene <file> [--step h] [--out path]
/// [--format csv|json] [--tolerance x]`. `args` excludes the program name.
/// Results go to --out, else the scene's output destination, else `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::uint64_t seed = kDefaultSeed);

}  // namespace pathlift::cli
