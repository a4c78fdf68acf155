#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "plural/ids.hpp"

namespace plural {

/// Raw standing may never be spent below this floor, keeping every member's
/// normalized standing strictly positive.
inline constexpr double kStandingFloor = 1e-6;

/// One citizen–community edge of the hypergraph. Weights are stored raw;
/// normalized standing and devotion are computed on read by SocialFabric.
struct MembershipEdge {
    double raw_standing = 1.0;
    double raw_devotion = 1.0;
    bool opted_in = true;

    bool operator==(const MembershipEdge&) const = default;
};

struct Citizen {
    CitizenId id;
    std::map<CommunityId, MembershipEdge> memberships;
    double lambda = 0.0;
    bool subscriber = false;
    bool accepts_personal_ads = false;

    bool operator==(const Citizen&) const = default;
};

using MemberSet = std::vector<CitizenId>;  // sorted, unique

struct Community {
    CommunityId id;
    MemberSet members;
    double lambda = 0.0;
    std::vector<MemberSet> principal_subcommunities;
    bool admin_registered = false;
    std::optional<std::pair<CommunityId, CommunityId>> derived_from;

    bool contains(CitizenId c) const;

    bool operator==(const Community&) const = default;
};

/// Hypergraph of citizens (nodes) and intersecting communities (hyperedges).
///
/// Single writer. Every mutation keeps membership symmetric and keeps the
/// cached raw-weight totals that normalization divides by in sync.
class SocialFabric {
public:
    CitizenId add_citizen(double lambda = 0.0, bool subscriber = false, bool accepts_personal_ads = false);
    CommunityId add_community(double lambda = 0.0, bool admin_registered = false);

    void add_membership(CitizenId citizen, CommunityId community, double raw_standing, double raw_devotion,
                        bool opted_in = true);

    /// Materializes (or returns the cached) intersection of two communities.
    /// nullopt when the intersection has no members. When the intersection
    /// equals one of the operands that operand is returned.
    std::optional<CommunityId> intersect_communities(CommunityId a, CommunityId b);

    void update_devotion(CitizenId citizen, CommunityId community, double new_raw);

    /// Adds delta_raw to the member's raw standing; throws InsufficientStanding
    /// when the result would drop below kStandingFloor.
    void update_standing(CitizenId citizen, CommunityId community, double delta_raw);

    double standing(CitizenId citizen, CommunityId community) const;
    double devotion(CitizenId citizen, CommunityId community) const;
    double raw_standing(CitizenId citizen, CommunityId community) const;
    bool is_member(CitizenId citizen, CommunityId community) const;

    void set_citizen_lambda(CitizenId citizen, double lambda);
    void set_community_lambda(CommunityId community, double lambda);
    void set_principal_subcommunities(CommunityId community, std::vector<MemberSet> blocs);
    void set_admin_registered(CommunityId community, bool registered);

    const Citizen& citizen(CitizenId id) const;
    const Community& community(CommunityId id) const;
    const std::vector<Citizen>& citizens() const { return citizens_; }
    const std::vector<Community>& communities() const { return communities_; }
    std::size_t citizen_count() const { return citizens_.size(); }
    std::size_t community_count() const { return communities_.size(); }

    /// Full consistency check. Returns one message per violated invariant.
    std::vector<std::string> audit() const;

    bool operator==(const SocialFabric& other) const {
        return citizens_ == other.citizens_ && communities_ == other.communities_;
    }

private:
    friend SocialFabric fabric_from_json(const nlohmann::json& j);

    Citizen& citizen_mut(CitizenId id);
    Community& community_mut(CommunityId id);
    MembershipEdge& edge_mut(CitizenId citizen, CommunityId community);
    const MembershipEdge& edge(CitizenId citizen, CommunityId community) const;
    void refresh_standing_total(CommunityId community);
    void refresh_devotion_total(CitizenId citizen);

    std::vector<Citizen> citizens_;
    std::vector<Community> communities_;
    std::vector<double> standing_totals_;  // per community, Σ raw standing
    std::vector<double> devotion_totals_;  // per citizen, Σ raw devotion
    std::map<std::pair<CommunityId, CommunityId>, std::optional<CommunityId>> intersection_cache_;
};

void to_json(nlohmann::json& j, const SocialFabric& fabric);
SocialFabric fabric_from_json(const nlohmann::json& j);

}  // namespace plural
