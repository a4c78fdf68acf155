#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "plural/content.hpp"
#include "plural/fabric.hpp"
#include "plural/score.hpp"

namespace plural {

/// Additive terms of one content's exposure numerator for one citizen:
/// λ(p)ψ(m;p) and d(c;p)λ(c)ψ(m;c) per community.
struct ExposureTerms {
    double citizen = 0.0;
    std::vector<std::pair<CommunityId, double>> communities;

    double numerator() const;
};

struct ExposureWeight {
    ContentId content;
    double weight = 0.0;
    ExposureTerms terms;
};

struct ExposureWeights {
    std::vector<ExposureWeight> entries;  // candidate pool order
    bool uniform_fallback = false;        // every numerator was 0
};

/// Attention shares e(m;p) over the candidate pool. Falls back to a uniform
/// split when every numerator is 0.
ExposureWeights exposure_weights(CitizenId citizen, const SocialFabric& fabric, const ScoreBoard& board,
                                 std::span<const ContentId> pool, int round);

enum class ProvenanceKind : std::uint8_t { Bridging, Divisive };
std::string_view to_string(ProvenanceKind kind);

struct ProvenanceTag {
    Scope scope;
    ProvenanceKind kind = ProvenanceKind::Bridging;
    std::vector<ContentId> balancing_peek;  // Divisive only
};

struct FeedEntry {
    ContentId content;
    double exposure_share = 0.0;
    std::vector<ProvenanceTag> provenance;
    int rank_position = 0;
    bool exploration = false;
    ExposureTerms terms;  // numerator breakdown, used for sponsorship attribution
};

/// Social-provenance tags for `content` as seen by `citizen`: one per member
/// community where the card is Bridging or Divisive, plus the citizen-scope
/// card when given.
std::vector<ProvenanceTag> provenance_tags(ContentId content, CitizenId citizen, const SocialFabric& fabric,
                                           const ScoreBoard& board, const ScoreCard* citizen_card);

/// Number of exploration slots drawn for a feed of size k.
int exploration_slots(int k, double epsilon);

/// Top-k by weight takes (1 − ε) of attention in proportion to weight; ε is
/// spread evenly over a seeded sample of the remaining pool. Entries are sorted
/// by share descending, ties by content id. Provenance is attached from the
/// board (community scopes) and `citizen_cards` (citizen scope).
std::vector<FeedEntry> build_feed(CitizenId citizen, const ExposureWeights& weights, int k, double epsilon,
                                  std::uint64_t seed, const SocialFabric& fabric, const ScoreBoard& board,
                                  const std::map<ContentId, ScoreCard>* citizen_cards = nullptr);

/// Content targeted at any of the citizen's communities that the citizen has
/// not reacted to and did not create, plus `personal_ads`. Sorted by id.
std::vector<ContentId> candidate_pool(CitizenId citizen, const SocialFabric& fabric, const ContentCatalog& catalog,
                                      const ReactionMatrix& reactions, std::span<const ContentId> personal_ads = {});

/// Standing purchased by advertisers, spendable on seeding in one community.
class SeedingAllowances {
public:
    void grant(AdvertiserId advertiser, CommunityId community, double amount);
    double available(AdvertiserId advertiser, CommunityId community) const;
    /// Throws InsufficientStanding when the allowance is smaller than `amount`.
    void spend(AdvertiserId advertiser, CommunityId community, double amount);

private:
    std::map<std::pair<AdvertiserId, CommunityId>, double> allowance_;
};

struct SeedingParams {
    double stake_scale = 10.0;
    int seed_rounds = 2;

    bool operator==(const SeedingParams&) const = default;
};

/// Spends `stake` of the creator's standing (or an advertiser's purchased
/// allowance) to give content an initial ψ = stake · stake_scale in the
/// community for seed_rounds rounds starting at `round`. Returns the override
/// (0 and no override when stake is 0).
double seed_content(ContentId content, CommunityId community, const Creator& creator, double stake,
                    SocialFabric& fabric, SeedingAllowances& allowances, ScoreBoard& board, int round,
                    const SeedingParams& params);

}  // namespace plural
