#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace stoplaw {

// Parsed command line. Per-file configuration lives in the JSON config; the
// flags here override matching config fields.
struct CliOptions {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<long> paths;
    std::optional<bool> exact_sampling;
    std::optional<std::pair<int, int>> grid;
};

// Runs one command end to end, writing result files into out_dir.
// Exit codes: 0 success, 1 internal numeric failure, 2 invalid input or
// unattainable target.
int run_command(const CliOptions& opt);

}  // namespace stoplaw
