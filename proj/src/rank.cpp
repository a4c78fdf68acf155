#include "plural/rank.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "plural/error.hpp"
#include "plural/rng.hpp"

namespace plural {

double ExposureTerms::numerator() const {
    double n = citizen;
    for (const auto& [_, v] : communities) n += v;
    return n;
}

ExposureWeights exposure_weights(CitizenId citizen, const SocialFabric& fabric, const ScoreBoard& board,
                                 std::span<const ContentId> pool, int round) {
    require(!pool.empty(), ErrorCode::InvalidArgument, "candidate pool is empty");
    const Citizen& p = fabric.citizen(citizen);

    struct Weighted {
        CommunityId community;
        double coefficient;  // d(c;p)·λ(c)
    };
    std::vector<Weighted> coeffs;
    for (const auto& [c, _] : p.memberships) {
        coeffs.push_back({c, fabric.devotion(citizen, c) * fabric.community(c).lambda});
    }

    ExposureWeights out;
    out.entries.reserve(pool.size());
    double total = 0.0;
    for (ContentId m : pool) {
        ExposureWeight w;
        w.content = m;
        if (p.lambda > 0.0) w.terms.citizen = p.lambda * board.psi(m, Scope::of(citizen), round);
        for (const auto& [c, coef] : coeffs) {
            if (coef == 0.0) continue;
            const double term = coef * board.psi(m, Scope::of(c), round);
            if (term != 0.0) w.terms.communities.emplace_back(c, term);
        }
        w.weight = w.terms.numerator();
        total += w.weight;
        out.entries.push_back(std::move(w));
    }
    if (total > 0.0) {
        for (auto& w : out.entries) w.weight /= total;
    } else {
        out.uniform_fallback = true;
        const double share = 1.0 / static_cast<double>(pool.size());
        for (auto& w : out.entries) w.weight = share;
    }
    return out;
}

std::string_view to_string(ProvenanceKind kind) { return kind == ProvenanceKind::Bridging ? "Bridging" : "Divisive"; }

std::vector<ProvenanceTag> provenance_tags(ContentId content, CitizenId citizen, const SocialFabric& fabric,
                                           const ScoreBoard& board, const ScoreCard* citizen_card) {
    std::vector<ProvenanceTag> tags;
    auto add = [&](const ScoreCard& card) {
        if (card.label == Label::Bridging) {
            tags.push_back({card.scope, ProvenanceKind::Bridging, {}});
        } else if (card.label == Label::Divisive) {
            tags.push_back({card.scope, ProvenanceKind::Divisive, board.balancing(content, card.scope)});
        }
    };
    for (const auto& [c, _] : fabric.citizen(citizen).memberships) {
        if (const ScoreCard* card = board.find(content, Scope::of(c))) add(*card);
    }
    if (citizen_card) add(*citizen_card);
    return tags;
}

int exploration_slots(int k, double epsilon) {
    if (epsilon <= 0.0) return 0;
    return std::max(1, static_cast<int>(std::ceil(epsilon * k - 1e-9)));
}

std::vector<FeedEntry> build_feed(CitizenId citizen, const ExposureWeights& weights, int k, double epsilon,
                                  std::uint64_t seed, const SocialFabric& fabric, const ScoreBoard& board,
                                  const std::map<ContentId, ScoreCard>* citizen_cards) {
    require(k >= 1, ErrorCode::InvalidArgument, "feed size must be >= 1");
    require(epsilon >= 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument, "epsilon must lie in [0, 1)");
    const auto& entries = weights.entries;
    std::vector<std::size_t> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (entries[a].weight != entries[b].weight) return entries[a].weight > entries[b].weight;
        return entries[a].content < entries[b].content;
    });

    const std::size_t top_n = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::vector<FeedEntry> feed;
    if (top_n == order.size()) {
        // Nothing left to explore; the feed is the whole allocation.
        for (std::size_t i : order) feed.push_back({entries[i].content, entries[i].weight, {}, 0, false, entries[i].terms});
    } else {
        std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(top_n), order.end());
        const auto slots = std::min<std::size_t>(static_cast<std::size_t>(exploration_slots(k, epsilon)), rest.size());
        const double exploit = slots > 0 ? 1.0 - epsilon : 1.0;

        double top_total = 0.0;
        for (std::size_t r = 0; r < top_n; ++r) top_total += entries[order[r]].weight;
        for (std::size_t r = 0; r < top_n; ++r) {
            const auto& e = entries[order[r]];
            const double share = top_total > 0.0 ? exploit * e.weight / top_total : exploit / static_cast<double>(top_n);
            feed.push_back({e.content, share, {}, 0, false, e.terms});
        }
        if (slots > 0) {
            // Sample in canonical content order so the draw does not depend on weight ties.
            std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return entries[a].content < entries[b].content; });
            Rng rng(seed);
            for (std::size_t s = 0; s < slots; ++s) {
                const auto j = s + static_cast<std::size_t>(rng.below(rest.size() - s));
                std::swap(rest[s], rest[j]);
                feed.push_back({entries[rest[s]].content, epsilon / static_cast<double>(slots), {}, 0, true,
                                entries[rest[s]].terms});
            }
        }
        std::stable_sort(feed.begin(), feed.end(), [](const FeedEntry& a, const FeedEntry& b) {
            if (a.exposure_share != b.exposure_share) return a.exposure_share > b.exposure_share;
            return a.content < b.content;
        });
    }

    for (std::size_t i = 0; i < feed.size(); ++i) {
        auto& f = feed[i];
        f.rank_position = static_cast<int>(i);
        const ScoreCard* own = nullptr;
        if (citizen_cards) {
            if (auto it = citizen_cards->find(f.content); it != citizen_cards->end()) own = &it->second;
        } else {
            own = board.find(f.content, Scope::of(citizen));
        }
        f.provenance = provenance_tags(f.content, citizen, fabric, board, own);
    }
    return feed;
}

std::vector<ContentId> candidate_pool(CitizenId citizen, const SocialFabric& fabric, const ContentCatalog& catalog,
                                      const ReactionMatrix& reactions, std::span<const ContentId> personal_ads) {
    const Citizen& p = fabric.citizen(citizen);
    std::vector<ContentId> pool;
    for (const auto& item : catalog.items()) {
        if (const auto* author = std::get_if<CitizenId>(&item.creator); author && *author == citizen) continue;
        const bool targeted = std::any_of(item.target_communities.begin(), item.target_communities.end(),
                                          [&](CommunityId c) { return p.memberships.contains(c); });
        if (!targeted) continue;
        if (reactions.has_reacted(citizen, item.id)) continue;
        pool.push_back(item.id);
    }
    for (ContentId m : personal_ads) {
        if (!reactions.has_reacted(citizen, m)) pool.push_back(m);
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    return pool;
}

void SeedingAllowances::grant(AdvertiserId advertiser, CommunityId community, double amount) {
    require(amount >= 0.0, ErrorCode::InvalidArgument, "allowance must be >= 0");
    allowance_[{advertiser, community}] += amount;
}

double SeedingAllowances::available(AdvertiserId advertiser, CommunityId community) const {
    auto it = allowance_.find({advertiser, community});
    return it == allowance_.end() ? 0.0 : it->second;
}

void SeedingAllowances::spend(AdvertiserId advertiser, CommunityId community, double amount) {
    const double have = available(advertiser, community);
    if (amount > have) {
        fail(ErrorCode::InsufficientStanding,
             fmt::format("advertiser {} holds {} seeding standing in community {}, needs {}", advertiser.value, have,
                         community.value, amount));
    }
    allowance_[{advertiser, community}] = have - amount;
}

double seed_content(ContentId content, CommunityId community, const Creator& creator, double stake,
                    SocialFabric& fabric, SeedingAllowances& allowances, ScoreBoard& board, int round,
                    const SeedingParams& params) {
    require(stake >= 0.0 && std::isfinite(stake), ErrorCode::InvalidArgument, "stake must be >= 0");
    if (const auto* citizen = std::get_if<CitizenId>(&creator)) {
        if (!fabric.is_member(*citizen, community)) {
            fail(ErrorCode::InsufficientStanding,
                 fmt::format("citizen {} holds no standing in community {}", citizen->value, community.value));
        }
        if (stake == 0.0) return 0.0;
        fabric.update_standing(*citizen, community, -stake);
    } else {
        const auto advertiser = std::get<AdvertiserId>(creator);
        if (stake == 0.0) return 0.0;
        allowances.spend(advertiser, community, stake);
    }
    const double psi = stake * params.stake_scale;
    board.set_override(content, community, psi, round, round + params.seed_rounds);
    return psi;
}

}  // namespace plural
