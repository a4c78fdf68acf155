#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "plural/econ.hpp"
#include "plural/score.hpp"

namespace plural {

inline constexpr int kSchemaVersion = 1;

/// A planted group of citizens whose ideologies are drawn around `center`.
struct BlocTemplate {
    std::string name;
    std::vector<double> center;
    double sigma = 0.1;
    double share = 1.0;  // relative size

    bool operator==(const BlocTemplate&) const = default;
};

struct PopulationConfig {
    int citizens = 0;
    int dimensions = 2;
    std::vector<BlocTemplate> blocs;
    double initial_standing = 1.0;
    double devotion_min = 0.5;
    double devotion_max = 1.5;
    double citizen_lambda = 0.0;
    Funding citizen_funding = Funding::SelfPaid;
    double citizen_price = 1.0;
    double citizen_balance = 0.0;
    double personal_ads_share = 0.0;  // fraction of citizens accepting personal ads
    double subscriber_share = 0.0;

    bool operator==(const PopulationConfig&) const = default;
};

/// A community seeded from one or more planted blocs.
struct CommunityTemplate {
    std::string name;
    std::vector<int> blocs;
    double membership_rate = 1.0;
    double lambda = 0.0;
    Funding funding = Funding::SelfPaid;
    double price = 1.0;
    double balance = 0.0;
    bool admin_registered = false;

    bool operator==(const CommunityTemplate&) const = default;
};

struct DealConfig {
    int community = 0;
    double price = 0.0;
    bool accepted = true;

    bool operator==(const DealConfig&) const = default;
};

struct StandingPurchaseConfig {
    int community = 0;
    double amount = 0.0;
    double price = 0.0;

    bool operator==(const StandingPurchaseConfig&) const = default;
};

struct AdvertiserConfig {
    double budget = 0.0;
    std::vector<DealConfig> deals;
    bool citizen_targeting = false;
    double citizen_price = 0.0;
    int ads_per_round = 0;
    double stake = 0.0;
    double position_spread = 0.5;
    std::vector<StandingPurchaseConfig> standing_purchases;

    bool operator==(const AdvertiserConfig&) const = default;
};

struct ContentConfig {
    int posts_per_round = 10;
    int topics = 5;
    double stake_min = 0.0;
    double stake_max = 0.0;
    double position_noise = 0.5;
    std::vector<AdvertiserConfig> advertisers;

    bool operator==(const ContentConfig&) const = default;
};

struct DetectConfig {
    int max_columns = 100;  // reaction columns fed to the bloc split
    int min_reactors = 2;

    bool operator==(const DetectConfig&) const = default;
};

struct ScoringConfig {
    ScoreParams params;
    double balancing_delta_tol = 0.1;
    bool balancing_topic_overlap = false;
    DetectConfig detect;

    bool operator==(const ScoringConfig&) const = default;
};

struct RankingConfig {
    int k = 10;
    double epsilon = 0.1;
    SeedingParams seeding;

    bool operator==(const RankingConfig&) const = default;
};

struct SimConfig {
    int rounds = 30;
    int refresh_interval = 5;
    double gamma = 0.1;
    double temperature = 1.0;
    double attitude_bias = 0.0;
    double engagement_scale = 1.0;
    int top_exposed = 10;
    int coherence_top = 5;

    bool operator==(const SimConfig&) const = default;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    PopulationConfig population;
    std::vector<CommunityTemplate> communities;
    ContentConfig content;
    ScoringConfig scoring;
    RankingConfig ranking;
    EconParams econ;
    SimConfig sim;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Validates every field; throws ConfigError naming the JSON pointer of the
/// first offending value. Unknown keys are rejected.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

/// Reads and parses a scenario file. A missing or malformed file is a ConfigError.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Full serialization including defaults; parse_scenario(scenario_to_json(c)) == c.
nlohmann::json scenario_to_json(const ScenarioConfig& config);

}  // namespace plural
