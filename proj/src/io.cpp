#include "plural/io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "plural/error.hpp"

namespace plural {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, fmt::format("cannot write {}", path.string()));
    return out;
}

std::string join_blocs(const std::vector<int>& blocs) {
    std::string s;
    for (std::size_t i = 0; i < blocs.size(); ++i) s += fmt::format("{}{}", i ? ";" : "", blocs[i]);
    return s;
}

}  // namespace

void write_metrics_csv(const fs::path& path, std::span<const RoundMetrics> metrics) {
    auto out = open_out(path);
    std::vector<CommunityId> communities;
    if (!metrics.empty()) {
        for (const auto& [c, _] : metrics.front().coherence) communities.push_back(c);
    }
    out << "round,common_belief_top_exposed,polarization_index,attention_gini,platform_revenue";
    for (CommunityId c : communities) out << ",coherence_" << c.value;
    out << '\n';
    for (const auto& m : metrics) {
        out << fmt::format("{},{},{},{},{}", m.round, m.common_belief_top_exposed, m.polarization_index,
                           m.attention_gini, m.platform_revenue);
        for (CommunityId c : communities) {
            auto it = m.coherence.find(c);
            out << ',' << fmt::format("{}", it == m.coherence.end() ? 0.0 : it->second);
        }
        out << '\n';
    }
}

void write_feeds_jsonl(const fs::path& path, const std::vector<std::vector<CitizenFeed>>& rounds) {
    // One record per (round, citizen, rank_position).
    auto out = open_out(path);
    for (std::size_t t = 0; t < rounds.size(); ++t) {
        for (const auto& feed : rounds[t]) {
            for (const auto& e : feed.entries) {
                json tags = json::array();
                for (const auto& tag : e.provenance) {
                    json peek = json::array();
                    for (ContentId m : tag.balancing_peek) peek.push_back(m.value);
                    tags.push_back({{"scope_kind", to_string(tag.scope.kind)},
                                    {"scope_id", tag.scope.id},
                                    {"label", to_string(tag.kind)},
                                    {"balancing", peek}});
                }
                const json line = {{"round", t},
                                   {"citizen", feed.citizen.value},
                                   {"rank_position", e.rank_position},
                                   {"content", e.content.value},
                                   {"exposure_share", e.exposure_share},
                                   {"exploration", e.exploration},
                                   {"provenance", tags}};
                out << line.dump() << '\n';
            }
        }
    }
}

void write_ledger_csv(const fs::path& path, const Ledger& ledger) {
    auto out = open_out(path);
    out << "round,from_kind,from_id,to_kind,to_id,amount,reason\n";
    for (const auto& e : ledger.entries()) {
        out << fmt::format("{},{},{},{},{},{},{}\n", e.round, to_string(e.from.kind), e.from.id, to_string(e.to.kind),
                           e.to.id, e.amount, to_string(e.reason));
    }
}

void write_fabric_json(const fs::path& path, const SocialFabric& fabric) {
    auto out = open_out(path);
    json j;
    to_json(j, fabric);
    out << j.dump(2) << '\n';
}

void write_scorecards_csv(const fs::path& path, std::span<const ScoreCard> cards) {
    auto out = open_out(path);
    out << "content_id,scope_kind,scope_id,iota,beta,delta,psi,label,characteristic_blocs\n";
    for (const auto& c : cards) {
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", c.content.value, to_string(c.scope.kind), c.scope.id, c.iota,
                           c.beta, c.delta, c.psi, to_string(c.label), join_blocs(c.characteristic_blocs));
    }
}

ReactionMatrix read_reactions_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open reactions file");
    ReactionMatrix reactions;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("citizen_id", 0) == 0) continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<long long> v;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stoll(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError(fmt::format("{}:{}", path.string(), line_no), fmt::format("not an integer: '{}'", cell));
            }
        }
        const std::string where = fmt::format("{}:{}", path.string(), line_no);
        if (v.size() != 5) throw ConfigError(where, fmt::format("expected 5 columns, got {}", v.size()));
        if (v[0] < 0 || v[1] < 0 || v[2] < 0) throw ConfigError(where, "ids and round must be non-negative");
        if (v[3] != 0 && v[3] != 1) throw ConfigError(where, "exposed must be 0 or 1");
        if (v[4] < -1 || v[4] > 1) throw ConfigError(where, "reaction must be -1, 0 or 1");
        if (v[4] != 0 && v[3] == 0) throw ConfigError(where, "a reaction requires exposure");
        reactions.set(CitizenId(static_cast<std::uint32_t>(v[0])), ContentId(static_cast<std::uint32_t>(v[1])),
                      {v[3] == 1, static_cast<int>(v[4]), static_cast<int>(v[2])});
    }
    return reactions;
}

SocialFabric read_fabric_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open fabric file");
    try {
        return fabric_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError(path.string(), e.what());
    }
}

void write_run_outputs(const fs::path& dir, const RunResult& result) {
    fs::create_directories(dir);
    write_metrics_csv(dir / "metrics.csv", result.metrics);
    write_feeds_jsonl(dir / "feeds.jsonl", result.feeds);
    write_ledger_csv(dir / "ledger.csv", result.ledger);
    write_fabric_json(dir / "fabric.json", result.population.fabric);
    std::vector<ScoreCard> cards;
    for (const auto& [_, card] : result.board.cards()) cards.push_back(card);
    write_scorecards_csv(dir / "scorecards.csv", cards);
}

}  // namespace plural
