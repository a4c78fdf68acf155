#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "plural/config.hpp"
#include "plural/content.hpp"
#include "plural/econ.hpp"
#include "plural/fabric.hpp"
#include "plural/rank.hpp"
#include "plural/rng.hpp"
#include "plural/score.hpp"

namespace plural {

/// Latent state of one simulated citizen. Attitudes are filled on first
/// exposure; belief is always attitude × clamped cumulative exposure.
struct AgentState {
    CitizenId citizen;
    std::vector<double> ideology;
    std::map<ContentId, double> attitudes;
    std::map<ContentId, double> exposure;  // cumulative, clamped to [0, 1]
    std::map<ContentId, double> beliefs;
    int bloc = 0;  // planted bloc index

    double belief(ContentId m) const;
};

/// Synthetic population: a fabric plus one agent per citizen and the planted
/// bloc structure of every configured community.
struct Population {
    SocialFabric fabric;
    std::vector<AgentState> agents;                      // index = citizen id
    std::vector<std::vector<MemberSet>> planted_blocs;  // per community, one set per template bloc
};

/// Draws ideologies per bloc from isotropic Gaussians and joins citizens to the
/// communities whose templates list their bloc. Deterministic given `seed`.
Population gen_population(const ScenarioConfig& config, std::uint64_t seed);

/// logistic(bias − ‖ideology − position‖² / temperature).
double attitude(std::span<const double> ideology, std::span<const double> position, double temperature,
                double bias = 0.0);

/// Engages with probability min(1, engagement_scale · share); an engaged agent
/// approves with probability `attitude_value`, otherwise disapproves.
int react(double attitude_value, double exposure_share, Rng& rng, double engagement_scale = 1.0);

struct MemberBelief {
    CitizenId citizen;
    double belief = 0.0;
    double standing = 1.0;
};

/// Common belief of a scope. Within each bloc the standing-weighted arithmetic
/// mean; across blocs the √n-weighted geometric mean. Without usable blocs, a
/// single standing-weighted geometric mean over members. `members` must be
/// sorted by citizen id. Throws EmptyCommunity.
double aggregate_belief(std::span<const MemberBelief> members, std::span<const MemberSet> blocs);

struct RoundMetrics {
    int round = 0;
    double common_belief_top_exposed = 0.0;
    double polarization_index = 0.0;
    double attention_gini = 0.0;
    double platform_revenue = 0.0;
    std::map<CommunityId, double> coherence;
};

/// Top contents by cumulative exposure inside one community.
std::vector<ContentId> top_exposed_contents(const std::map<ContentId, double>& exposure, std::size_t n);

struct RunResult {
    std::vector<RoundMetrics> metrics;
    Population population;
    ContentCatalog catalog;
    ReactionMatrix reactions;
    ScoreBoard board;
    Ledger ledger;
    LambdaPolicies policies;
    std::vector<Advertiser> advertisers;
    std::vector<std::vector<CitizenFeed>> feeds;  // per round
    std::vector<SettlementEvent> events;
    std::vector<std::string> warnings;
};

/// Executes the closed loop for config.sim.rounds rounds. Fully deterministic
/// given the config; per-citizen work is spread over worker threads.
RunResult run(const ScenarioConfig& config);

}  // namespace plural
