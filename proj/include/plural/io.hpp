#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "plural/content.hpp"
#include "plural/econ.hpp"
#include "plural/fabric.hpp"
#include "plural/score.hpp"
#include "plural/sim.hpp"

namespace plural {

// Every writer emits UTF-8 with LF line endings and shortest round-trip
// number formatting, so identical inputs give byte-identical files.

void write_metrics_csv(const std::filesystem::path& path, std::span<const RoundMetrics> metrics);
void write_feeds_jsonl(const std::filesystem::path& path, const std::vector<std::vector<CitizenFeed>>& rounds);
void write_ledger_csv(const std::filesystem::path& path, const Ledger& ledger);
void write_fabric_json(const std::filesystem::path& path, const SocialFabric& fabric);
void write_scorecards_csv(const std::filesystem::path& path, std::span<const ScoreCard> cards);

/// Columns citizen_id, content_id, round, exposed, reaction with a header row.
/// Throws ConfigError naming the file and line on malformed input.
ReactionMatrix read_reactions_csv(const std::filesystem::path& path);
SocialFabric read_fabric_json(const std::filesystem::path& path);

/// Writes all five run artifacts into `dir` (created if missing).
void write_run_outputs(const std::filesystem::path& dir, const RunResult& result);

}  // namespace plural
