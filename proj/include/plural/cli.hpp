#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace plural::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

struct RunOptions {
    std::filesystem::path scenario;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    std::optional<int> rounds;
};

struct ScoreOptions {
    std::filesystem::path reactions;
    std::filesystem::path fabric;
    std::string backend = "gac_penrose";
    std::filesystem::path out;
};

struct CompareOptions {
    std::filesystem::path scenario;
    int seeds = 10;
    std::filesystem::path out;
    std::string baseline_scorer = "engagement";
};

int cmd_run(const RunOptions& options, std::ostream& err);
int cmd_score(const ScoreOptions& options, std::ostream& err);
int cmd_compare(const CompareOptions& options, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int main(int argc, char** argv);

}  // namespace plural::cli
