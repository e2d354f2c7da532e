#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace fellerdep::cli
{
enum ExitCode : int
{
    ok = 0,
    check_failed = 1,
    bad_config = 2,
};

struct RunOptions
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    unsigned jobs = 0;
    std::optional<std::string> out;
};

/// Seed used when neither the command line, the config nor FELLERDEP_SEED gives one.
constexpr std::uint64_t builtin_seed = 20240601;

/// Runs one experiment config; diagnostics go to `err`, a one-line summary per
/// output to `log`. Returns the process exit code.
int run(const RunOptions& opt, std::ostream& log, std::ostream& err);

void list_presets(std::ostream& out);

}  // namespace fellerdep::cli
