#include "plural/fabric.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "plural/error.hpp"

namespace plural {

bool Community::contains(CitizenId c) const { return std::binary_search(members.begin(), members.end(), c); }

CitizenId SocialFabric::add_citizen(double lambda, bool subscriber, bool accepts_personal_ads) {
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "citizen lambda must be >= 0");
    Citizen c;
    c.id = CitizenId(static_cast<std::uint32_t>(citizens_.size()));
    c.lambda = lambda;
    c.subscriber = subscriber;
    c.accepts_personal_ads = accepts_personal_ads;
    citizens_.push_back(std::move(c));
    devotion_totals_.push_back(0.0);
    return citizens_.back().id;
}

CommunityId SocialFabric::add_community(double lambda, bool admin_registered) {
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "community lambda must be >= 0");
    Community c;
    c.id = CommunityId(static_cast<std::uint32_t>(communities_.size()));
    c.lambda = lambda;
    c.admin_registered = admin_registered;
    communities_.push_back(std::move(c));
    standing_totals_.push_back(0.0);
    return communities_.back().id;
}

Citizen& SocialFabric::citizen_mut(CitizenId id) {
    if (id.index() >= citizens_.size()) fail(ErrorCode::NotFound, fmt::format("unknown citizen {}", id.value));
    return citizens_[id.index()];
}

Community& SocialFabric::community_mut(CommunityId id) {
    if (id.index() >= communities_.size()) fail(ErrorCode::NotFound, fmt::format("unknown community {}", id.value));
    return communities_[id.index()];
}

const Citizen& SocialFabric::citizen(CitizenId id) const {
    if (id.index() >= citizens_.size()) fail(ErrorCode::NotFound, fmt::format("unknown citizen {}", id.value));
    return citizens_[id.index()];
}

const Community& SocialFabric::community(CommunityId id) const {
    if (id.index() >= communities_.size()) fail(ErrorCode::NotFound, fmt::format("unknown community {}", id.value));
    return communities_[id.index()];
}

const MembershipEdge& SocialFabric::edge(CitizenId citizen_id, CommunityId community_id) const {
    const auto& c = citizen(citizen_id);
    community(community_id);
    auto it = c.memberships.find(community_id);
    if (it == c.memberships.end()) {
        fail(ErrorCode::NotFound, fmt::format("citizen {} is not a member of community {}", citizen_id.value,
                                              community_id.value));
    }
    return it->second;
}

MembershipEdge& SocialFabric::edge_mut(CitizenId citizen_id, CommunityId community_id) {
    return const_cast<MembershipEdge&>(std::as_const(*this).edge(citizen_id, community_id));
}

void SocialFabric::refresh_standing_total(CommunityId community_id) {
    double total = 0.0;
    for (CitizenId m : communities_[community_id.index()].members) {
        total += citizens_[m.index()].memberships.at(community_id).raw_standing;
    }
    standing_totals_[community_id.index()] = total;
}

void SocialFabric::refresh_devotion_total(CitizenId citizen_id) {
    double total = 0.0;
    for (const auto& [_, e] : citizens_[citizen_id.index()].memberships) total += e.raw_devotion;
    devotion_totals_[citizen_id.index()] = total;
}

void SocialFabric::add_membership(CitizenId citizen_id, CommunityId community_id, double raw_standing,
                                  double raw_devotion, bool opted_in) {
    auto& c = citizen_mut(citizen_id);
    auto& g = community_mut(community_id);
    require(raw_standing > 0.0 && std::isfinite(raw_standing), ErrorCode::InvalidArgument,
            "raw standing must be positive");
    require(raw_devotion > 0.0 && std::isfinite(raw_devotion), ErrorCode::InvalidArgument,
            "raw devotion must be positive");
    if (c.memberships.contains(community_id)) {
        fail(ErrorCode::AlreadyMember,
             fmt::format("citizen {} already belongs to community {}", citizen_id.value, community_id.value));
    }
    if (g.derived_from) {
        require(c.memberships.contains(g.derived_from->first) && c.memberships.contains(g.derived_from->second),
                ErrorCode::InvalidArgument, "an intersection community only admits members of both parents");
    }
    c.memberships.emplace(community_id, MembershipEdge{raw_standing, raw_devotion, opted_in});
    g.members.insert(std::lower_bound(g.members.begin(), g.members.end(), citizen_id), citizen_id);
    refresh_standing_total(community_id);
    refresh_devotion_total(citizen_id);

    // Keep materialized intersections equal to the intersection of their parents.
    for (std::size_t i = 0; i < communities_.size(); ++i) {
        const auto& parents = communities_[i].derived_from;
        if (!parents || (parents->first != community_id && parents->second != community_id)) continue;
        const CommunityId other = parents->first == community_id ? parents->second : parents->first;
        const CommunityId derived(static_cast<std::uint32_t>(i));
        if (!c.memberships.contains(other) || c.memberships.contains(derived)) continue;
        const auto [a, b] = *parents;
        const double s = std::min(standing(citizen_id, a), standing(citizen_id, b));
        const double d = std::min(edge(citizen_id, a).raw_devotion, edge(citizen_id, b).raw_devotion);
        add_membership(citizen_id, derived, s, d, edge(citizen_id, a).opted_in && edge(citizen_id, b).opted_in);
    }
}

std::optional<CommunityId> SocialFabric::intersect_communities(CommunityId a, CommunityId b) {
    community(a);
    community(b);
    if (a == b) return a;
    const auto key = std::minmax(a, b);
    if (auto it = intersection_cache_.find(key); it != intersection_cache_.end()) return it->second;

    const auto& ma = communities_[a.index()].members;
    const auto& mb = communities_[b.index()].members;
    MemberSet common;
    std::set_intersection(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(common));
    if (common.empty()) return std::nullopt;
    if (common == ma) return a;
    if (common == mb) return b;

    const CommunityId derived = add_community(0.0, false);
    communities_[derived.index()].derived_from = key;
    for (CitizenId m : common) {
        // Inherit the weaker of the two parent standings and devotions.
        const double s = std::min(standing(m, a), standing(m, b));
        const double d = std::min(edge(m, a).raw_devotion, edge(m, b).raw_devotion);
        add_membership(m, derived, s, d, edge(m, a).opted_in && edge(m, b).opted_in);
    }
    intersection_cache_[key] = derived;
    return derived;
}

void SocialFabric::update_devotion(CitizenId citizen_id, CommunityId community_id, double new_raw) {
    require(new_raw > 0.0 && std::isfinite(new_raw), ErrorCode::InvalidArgument, "raw devotion must be positive");
    edge_mut(citizen_id, community_id).raw_devotion = new_raw;
    refresh_devotion_total(citizen_id);
}

void SocialFabric::update_standing(CitizenId citizen_id, CommunityId community_id, double delta_raw) {
    require(std::isfinite(delta_raw), ErrorCode::InvalidArgument, "standing delta must be finite");
    auto& e = edge_mut(citizen_id, community_id);
    const double next = e.raw_standing + delta_raw;
    if (next < kStandingFloor) {
        fail(ErrorCode::InsufficientStanding,
             fmt::format("citizen {} has raw standing {} in community {}, cannot spend {}", citizen_id.value,
                         e.raw_standing, community_id.value, -delta_raw));
    }
    if (delta_raw == 0.0) return;
    e.raw_standing = next;
    refresh_standing_total(community_id);
}

double SocialFabric::standing(CitizenId citizen_id, CommunityId community_id) const {
    return edge(citizen_id, community_id).raw_standing / standing_totals_[community_id.index()];
}

double SocialFabric::devotion(CitizenId citizen_id, CommunityId community_id) const {
    return edge(citizen_id, community_id).raw_devotion / devotion_totals_[citizen_id.index()];
}

double SocialFabric::raw_standing(CitizenId citizen_id, CommunityId community_id) const {
    return edge(citizen_id, community_id).raw_standing;
}

bool SocialFabric::is_member(CitizenId citizen_id, CommunityId community_id) const {
    return citizen(citizen_id).memberships.contains(community_id);
}

void SocialFabric::set_citizen_lambda(CitizenId citizen_id, double lambda) {
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be >= 0");
    citizen_mut(citizen_id).lambda = lambda;
}

void SocialFabric::set_community_lambda(CommunityId community_id, double lambda) {
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be >= 0");
    community_mut(community_id).lambda = lambda;
}

void SocialFabric::set_principal_subcommunities(CommunityId community_id, std::vector<MemberSet> blocs) {
    auto& g = community_mut(community_id);
    if (!blocs.empty()) {
        require(blocs.size() >= 2 && blocs.size() <= 7, ErrorCode::InvalidArgument,
                "principal subcommunities must number between 2 and 7");
    }
    for (auto& bloc : blocs) {
        std::sort(bloc.begin(), bloc.end());
        bloc.erase(std::unique(bloc.begin(), bloc.end()), bloc.end());
        require(!bloc.empty(), ErrorCode::InvalidArgument, "principal subcommunity must be non-empty");
        require(std::includes(g.members.begin(), g.members.end(), bloc.begin(), bloc.end()),
                ErrorCode::InvalidArgument, "principal subcommunity must be a subset of the members");
    }
    g.principal_subcommunities = std::move(blocs);
}

void SocialFabric::set_admin_registered(CommunityId community_id, bool registered) {
    community_mut(community_id).admin_registered = registered;
}

std::vector<std::string> SocialFabric::audit() const {
    std::vector<std::string> problems;
    for (const auto& c : citizens_) {
        if (c.lambda < 0.0) problems.push_back(fmt::format("citizen {}: negative lambda", c.id.value));
        double sum = 0.0;
        for (const auto& [g, e] : c.memberships) {
            if (g.index() >= communities_.size()) {
                problems.push_back(fmt::format("citizen {}: dangling community {}", c.id.value, g.value));
                continue;
            }
            if (!communities_[g.index()].contains(c.id)) {
                problems.push_back(fmt::format("citizen {} lists community {} but not vice versa", c.id.value, g.value));
            }
            sum += devotion(c.id, g);
        }
        if (!c.memberships.empty() && std::abs(sum - 1.0) > 1e-9) {
            problems.push_back(fmt::format("citizen {}: devotions sum to {}", c.id.value, sum));
        }
    }
    for (const auto& g : communities_) {
        double sum = 0.0;
        if (!std::is_sorted(g.members.begin(), g.members.end())) {
            problems.push_back(fmt::format("community {}: member list unsorted", g.id.value));
        }
        for (CitizenId m : g.members) {
            if (m.index() >= citizens_.size()) {
                problems.push_back(fmt::format("community {}: dangling citizen {}", g.id.value, m.value));
                continue;
            }
            if (!citizens_[m.index()].memberships.contains(g.id)) {
                problems.push_back(fmt::format("community {} lists citizen {} but not vice versa", g.id.value, m.value));
                continue;
            }
            sum += standing(m, g.id);
        }
        if (!g.members.empty() && std::abs(sum - 1.0) > 1e-9) {
            problems.push_back(fmt::format("community {}: standings sum to {}", g.id.value, sum));
        }
        if (g.derived_from) {
            const auto& [pa, pb] = *g.derived_from;
            const auto& ma = communities_[pa.index()].members;
            const auto& mb = communities_[pb.index()].members;
            MemberSet common;
            std::set_intersection(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(common));
            if (common != g.members) {
                problems.push_back(fmt::format("community {}: not the intersection of its parents", g.id.value));
            }
        }
    }
    return problems;
}

void to_json(nlohmann::json& j, const SocialFabric& fabric) {
    auto citizens = nlohmann::json::array();
    auto memberships = nlohmann::json::array();
    for (const auto& c : fabric.citizens()) {
        citizens.push_back({{"id", c.id.value},
                            {"lambda", c.lambda},
                            {"subscriber", c.subscriber},
                            {"accepts_personal_ads", c.accepts_personal_ads}});
        for (const auto& [g, e] : c.memberships) {
            memberships.push_back({{"citizen", c.id.value},
                                   {"community", g.value},
                                   {"raw_standing", e.raw_standing},
                                   {"raw_devotion", e.raw_devotion},
                                   {"opted_in", e.opted_in}});
        }
    }
    auto communities = nlohmann::json::array();
    for (const auto& g : fabric.communities()) {
        nlohmann::json blocs = nlohmann::json::array();
        for (const auto& bloc : g.principal_subcommunities) {
            auto ids = nlohmann::json::array();
            for (CitizenId m : bloc) ids.push_back(m.value);
            blocs.push_back(std::move(ids));
        }
        nlohmann::json rec = {{"id", g.id.value},
                              {"lambda", g.lambda},
                              {"admin_registered", g.admin_registered},
                              {"principal_subcommunities", std::move(blocs)}};
        rec["derived_from"] = g.derived_from
                                  ? nlohmann::json::array({g.derived_from->first.value, g.derived_from->second.value})
                                  : nlohmann::json(nullptr);
        communities.push_back(std::move(rec));
    }
    j = {{"citizens", std::move(citizens)}, {"communities", std::move(communities)}, {"memberships", std::move(memberships)}};
}

SocialFabric fabric_from_json(const nlohmann::json& j) {
    SocialFabric fabric;
    try {
        const auto& citizens = j.at("citizens");
        for (std::size_t i = 0; i < citizens.size(); ++i) {
            const auto& c = citizens[i];
            require(c.at("id").get<std::uint32_t>() == i, ErrorCode::InvalidArgument,
                    "citizen ids must be dense and in order");
            fabric.add_citizen(c.value("lambda", 0.0), c.value("subscriber", false),
                               c.value("accepts_personal_ads", false));
        }
        const auto& communities = j.at("communities");
        for (std::size_t i = 0; i < communities.size(); ++i) {
            const auto& g = communities[i];
            require(g.at("id").get<std::uint32_t>() == i, ErrorCode::InvalidArgument,
                    "community ids must be dense and in order");
            fabric.add_community(g.value("lambda", 0.0), g.value("admin_registered", false));
        }
        for (const auto& m : j.at("memberships")) {
            fabric.add_membership(CitizenId(m.at("citizen").get<std::uint32_t>()),
                                  CommunityId(m.at("community").get<std::uint32_t>()),
                                  m.at("raw_standing").get<double>(), m.at("raw_devotion").get<double>(),
                                  m.value("opted_in", true));
        }
        for (std::size_t i = 0; i < communities.size(); ++i) {
            const auto& g = communities[i];
            const CommunityId id(static_cast<std::uint32_t>(i));
            if (auto it = g.find("principal_subcommunities"); it != g.end()) {
                std::vector<MemberSet> blocs;
                for (const auto& bloc : *it) {
                    MemberSet ids;
                    for (const auto& m : bloc) ids.emplace_back(m.get<std::uint32_t>());
                    blocs.push_back(std::move(ids));
                }
                fabric.set_principal_subcommunities(id, std::move(blocs));
            }
            if (auto it = g.find("derived_from"); it != g.end() && !it->is_null()) {
                const CommunityId a((*it).at(0).get<std::uint32_t>());
                const CommunityId b((*it).at(1).get<std::uint32_t>());
                fabric.communities_[i].derived_from = std::minmax(a, b);
                fabric.intersection_cache_[std::minmax(a, b)] = id;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidArgument, fmt::format("malformed fabric document: {}", e.what()));
    }
    return fabric;
}

}  // namespace plural
