#include "plural/econ.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <tuple>

#include "plural/error.hpp"

namespace plural {

std::string_view to_string(AccountOwner::Kind kind) {
    switch (kind) {
        case AccountOwner::Kind::Citizen: return "citizen";
        case AccountOwner::Kind::Community: return "community";
        case AccountOwner::Kind::Advertiser: return "advertiser";
        case AccountOwner::Kind::Platform: return "platform";
        case AccountOwner::Kind::CreatorPool: return "creator_pool";
    }
    return "platform";
}

std::string_view to_string(Reason reason) {
    switch (reason) {
        case Reason::ImpressionSponsorship: return "ImpressionSponsorship";
        case Reason::Subscription: return "Subscription";
        case Reason::AdImpression: return "AdImpression";
        case Reason::CreatorReward: return "CreatorReward";
        case Reason::PlatformFee: return "PlatformFee";
        case Reason::StandingPurchase: return "StandingPurchase";
    }
    return "ImpressionSponsorship";
}

std::string_view to_string(Funding funding) { return funding == Funding::SelfPaid ? "self_paid" : "ad_funded"; }

namespace {

std::string describe(AccountOwner o) { return fmt::format("{} {}", to_string(o.kind), o.id); }

}  // namespace

void Ledger::endow(AccountOwner owner, double amount) {
    require(amount >= 0.0 && std::isfinite(amount), ErrorCode::InvalidArgument, "endowment must be >= 0");
    balances_[owner] += amount;
    endowments_[owner] += amount;
}

void Ledger::transfer(int round, AccountOwner from, AccountOwner to, double amount, Reason reason) {
    require(amount > 0.0 && std::isfinite(amount), ErrorCode::InvalidArgument, "transfer amount must be positive");
    require(from != to, ErrorCode::InvalidArgument, "transfer needs two distinct accounts");
    const double have = balance(from);
    if (amount > have) {
        fail(ErrorCode::InsufficientFunds,
             fmt::format("{} holds {} and cannot pay {}", describe(from), have, amount));
    }
    balances_[from] = have - amount;
    balances_[to] += amount;
    entries_.push_back({round, from, to, amount, reason});
}

double Ledger::balance(AccountOwner owner) const {
    auto it = balances_.find(owner);
    return it == balances_.end() ? 0.0 : it->second;
}

LedgerAudit audit_ledger(const Ledger& ledger) {
    LedgerAudit audit;
    std::map<AccountOwner, double> replay = ledger.endowments();
    for (const auto& [_, v] : replay) audit.min_balance = std::min(audit.min_balance, v);
    for (const auto& e : ledger.entries()) {
        if (!(e.amount > 0.0)) audit.all_positive_amounts = false;
        auto& [debits, credits] = audit.round_totals[e.round];
        debits += e.amount;
        credits += e.amount;
        replay[e.from] -= e.amount;
        replay[e.to] += e.amount;
        audit.min_balance = std::min({audit.min_balance, replay[e.from], replay[e.to]});
    }
    for (const auto& [round, totals] : audit.round_totals) {
        audit.max_round_imbalance = std::max(audit.max_round_imbalance, std::abs(totals.first - totals.second));
    }
    // Money is only moved, never created: balances must replay exactly (up to
    // summation order) and sum to the total endowment.
    for (const auto& [owner, v] : replay) {
        if (std::abs(v - ledger.balance(owner)) > 1e-9) audit.balances_match = false;
    }
    double endowed = 0.0;
    double held = 0.0;
    for (const auto& [_, v] : ledger.endowments()) endowed += v;
    for (const auto& [_, v] : ledger.balances()) held += v;
    if (std::abs(endowed - held) > 1e-9 * std::max(1.0, endowed)) audit.balances_match = false;
    return audit;
}

const AdDeal* Advertiser::accepted_deal(CommunityId community) const {
    for (const auto& d : deals) {
        if (d.accepted && d.community == community) return &d;
    }
    return nullptr;
}

void LambdaPolicies::set_lambda(AccountOwner owner, double lambda, Funding funding, double price,
                                std::span<const Advertiser> advertisers, const SocialFabric& fabric) {
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be >= 0");
    require(price >= 0.0, ErrorCode::InvalidArgument, "price must be >= 0");
    require(owner.kind == AccountOwner::Kind::Citizen || owner.kind == AccountOwner::Kind::Community,
            ErrorCode::InvalidArgument, "only citizens and communities carry lambda");
    if (owner.kind == AccountOwner::Kind::Citizen) {
        // Non-subscribers cannot pay for λ themselves; only ads can fund it.
        if (!fabric.citizen(CitizenId(owner.id)).subscriber && lambda > 0.0) funding = Funding::AdFunded;
    } else {
        fabric.community(CommunityId(owner.id));
    }
    if (funding == Funding::AdFunded) {
        const bool has_deal = std::any_of(advertisers.begin(), advertisers.end(), [&](const Advertiser& a) {
            if (owner.kind == AccountOwner::Kind::Community) return a.accepted_deal(CommunityId(owner.id)) != nullptr;
            return a.citizen_targeting && fabric.citizen(CitizenId(owner.id)).accepts_personal_ads;
        });
        if (!has_deal) {
            fail(ErrorCode::NoAcceptedDeal, fmt::format("{} has no accepted advertiser deal", describe(owner)));
        }
    }
    pending_[owner] = LambdaPolicy{owner, lambda, funding, price};
}

std::vector<AccountOwner> LambdaPolicies::apply_pending(SocialFabric& fabric) {
    std::vector<AccountOwner> changed;
    for (auto& [owner, policy] : pending_) {
        if (owner.kind == AccountOwner::Kind::Citizen) fabric.set_citizen_lambda(CitizenId(owner.id), policy.lambda);
        else fabric.set_community_lambda(CommunityId(owner.id), policy.lambda);
        active_[owner] = policy;
        changed.push_back(owner);
    }
    pending_.clear();
    return changed;
}

void LambdaPolicies::clamp(AccountOwner owner) {
    LambdaPolicy p = pending_.contains(owner) ? pending_[owner] : (active_.contains(owner) ? active_[owner] : LambdaPolicy{owner});
    p.owner = owner;
    p.lambda = 0.0;
    pending_[owner] = p;
}

const LambdaPolicy* LambdaPolicies::find(AccountOwner owner) const {
    auto it = active_.find(owner);
    return it == active_.end() ? nullptr : &it->second;
}

double LambdaPolicies::price(AccountOwner owner, double fallback) const {
    const auto* p = find(owner);
    return p ? p->price_per_lambda_impression : fallback;
}

namespace {

using FlowKey = std::tuple<AccountOwner, AccountOwner, Reason>;
using Flows = std::map<FlowKey, double>;  // ordered by payer first

// Pays every flow of every payer, capping each payer at its balance. Returns
// the payers that could not cover their total.
std::vector<AccountOwner> apply_flows(int round, const Flows& flows, Ledger& ledger, double& platform_revenue) {
    std::vector<AccountOwner> short_payers;
    auto it = flows.begin();
    while (it != flows.end()) {
        const AccountOwner payer = std::get<0>(it->first);
        auto end = it;
        double owed = 0.0;
        while (end != flows.end() && std::get<0>(end->first) == payer) {
            owed += end->second;
            ++end;
        }
        const double have = ledger.balance(payer);
        const bool short_paid = owed > have;
        const double scale = short_paid ? (owed > 0.0 ? have / owed : 0.0) : 1.0;
        for (auto f = it; f != end; ++f) {
            const auto& [from, to, reason] = f->first;
            const double remaining = ledger.balance(payer);
            double amount = f->second * scale;
            if (short_paid && std::next(f) == end) amount = remaining;
            amount = std::min(amount, remaining);
            if (amount <= 0.0) continue;
            ledger.transfer(round, from, to, amount, reason);
            if (reason == Reason::PlatformFee) platform_revenue += amount;
        }
        if (short_paid) short_payers.push_back(payer);
        it = end;
    }
    return short_payers;
}

AccountOwner creator_account(const ContentItem& item, CommunityId fallback_community) {
    if (const auto* c = std::get_if<CitizenId>(&item.creator)) return AccountOwner::of(*c);
    return AccountOwner::pool(fallback_community);
}

}  // namespace

Settlement settle_round(int round, std::span<const CitizenFeed> feeds, const SocialFabric& fabric,
                        const ContentCatalog& catalog, LambdaPolicies& policies,
                        std::span<const Advertiser> advertisers, const EconParams& params, Ledger& ledger) {
    require(params.platform_fee >= 0.0 && params.creator_share >= 0.0 &&
                params.platform_fee + params.creator_share <= 1.0 + 1e-12,
            ErrorCode::InvalidArgument, "platform_fee + creator_share must not exceed 1");
    Settlement out;
    Flows ad_flows;
    Flows sponsor_flows;
    const double pool_share = std::max(0.0, 1.0 - params.platform_fee - params.creator_share);

    auto find_advertiser = [&](AdvertiserId id) -> const Advertiser* {
        for (const auto& a : advertisers) {
            if (a.id == id) return &a;
        }
        return nullptr;
    };

    for (const auto& feed : feeds) {
        const Citizen& citizen = fabric.citizen(feed.citizen);
        for (const auto& entry : feed.entries) {
            const ContentItem& item = catalog.get(entry.content);
            const double num = entry.terms.numerator();
            const double share = entry.exposure_share;
            if (share <= 0.0) continue;

            if (const auto* ad_id = std::get_if<AdvertiserId>(&item.creator)) {
                if (const Advertiser* ad = find_advertiser(*ad_id)) {
                    const AccountOwner payer = AccountOwner::of(*ad_id);
                    bool paid = false;
                    if (num > 0.0) {
                        if (entry.terms.citizen > 0.0 && ad->citizen_targeting && citizen.accepts_personal_ads) {
                            const double amount = ad->citizen_price_per_impression * share * entry.terms.citizen / num;
                            if (amount > 0.0) {
                                ad_flows[{payer, AccountOwner::of(feed.citizen), Reason::AdImpression}] += amount;
                                paid = true;
                            }
                        }
                        for (const auto& [c, term] : entry.terms.communities) {
                            const AdDeal* deal = ad->accepted_deal(c);
                            if (!deal) continue;
                            const double amount = deal->price_per_impression * share * term / num;
                            if (amount > 0.0) {
                                ad_flows[{payer, AccountOwner::of(c), Reason::AdImpression}] += amount;
                                paid = true;
                            }
                        }
                    }
                    if (!paid) {
                        // Unsponsored impression: the lowest-id dealing community the viewer belongs to is paid.
                        for (CommunityId c : item.target_communities) {
                            const AdDeal* deal = ad->accepted_deal(c);
                            if (!deal || !citizen.memberships.contains(c)) continue;
                            const double amount = deal->price_per_impression * share;
                            if (amount > 0.0) ad_flows[{payer, AccountOwner::of(c), Reason::AdImpression}] += amount;
                            break;
                        }
                    }
                }
            }

            if (num <= 0.0) continue;
            auto charge = [&](AccountOwner sponsor, CommunityId pool_community, double term, Reason creator_reason) {
                const double cost = policies.price(sponsor, params.price_per_lambda_impression) * share * term / num;
                if (cost <= 0.0) return;
                const AccountOwner creator = creator_account(item, pool_community);
                const AccountOwner pool = AccountOwner::pool(pool_community);
                if (params.platform_fee > 0.0) {
                    sponsor_flows[{sponsor, AccountOwner::platform(), Reason::PlatformFee}] += cost * params.platform_fee;
                }
                if (params.creator_share > 0.0 && creator != sponsor) {
                    sponsor_flows[{sponsor, creator, creator_reason}] += cost * params.creator_share;
                }
                if (pool_share > 0.0) sponsor_flows[{sponsor, pool, Reason::CreatorReward}] += cost * pool_share;
            };
            if (entry.terms.citizen > 0.0) {
                charge(AccountOwner::of(feed.citizen), item.target_communities.front(), entry.terms.citizen,
                       Reason::Subscription);
            }
            for (const auto& [c, term] : entry.terms.communities) {
                charge(AccountOwner::of(c), c, term, Reason::ImpressionSponsorship);
            }
        }
    }

    for (const auto& [key, amount] : ad_flows) out.ad_charges += amount;
    for (const auto& [key, amount] : sponsor_flows) out.sponsor_charges += amount;

    double platform_revenue = 0.0;
    for (AccountOwner a : apply_flows(round, ad_flows, ledger, platform_revenue)) {
        out.events.push_back({round, a, "advertiser budget exhausted"});
    }
    for (AccountOwner s : apply_flows(round, sponsor_flows, ledger, platform_revenue)) {
        policies.clamp(s);
        out.events.push_back({round, s, "insufficient funds; lambda clamped to 0"});
    }
    out.platform_revenue = platform_revenue;
    return out;
}

void reward_standing(const ScoreBoard& board, const ContentCatalog& catalog, SocialFabric& fabric, double reward_rate) {
    require(reward_rate >= 0.0, ErrorCode::InvalidArgument, "reward_rate must be >= 0");
    if (reward_rate == 0.0) return;
    for (const auto& item : catalog.items()) {
        const auto* creator = std::get_if<CitizenId>(&item.creator);
        if (!creator) continue;
        for (CommunityId c : item.target_communities) {
            if (!fabric.is_member(*creator, c)) continue;
            const ScoreCard* card = board.find(item.id, Scope::of(c));
            if (!card || card->psi <= 0.0) continue;
            fabric.update_standing(*creator, c, reward_rate * card->psi);
        }
    }
}

void sell_standing(AdvertiserId advertiser, CommunityId community, double amount, double price, int round,
                   Ledger& ledger, const SocialFabric& fabric, SeedingAllowances& allowances) {
    require(amount > 0.0 && price > 0.0, ErrorCode::InvalidArgument, "amount and price must be positive");
    if (!fabric.community(community).admin_registered) {
        fail(ErrorCode::Unregistered, fmt::format("community {} has no registered administrator", community.value));
    }
    const AccountOwner buyer = AccountOwner::of(advertiser);
    if (ledger.balance(buyer) < price) {
        fail(ErrorCode::InsufficientFunds,
             fmt::format("advertiser {} holds {} but standing costs {}", advertiser.value, ledger.balance(buyer), price));
    }
    ledger.transfer(round, buyer, AccountOwner::of(community), price, Reason::StandingPurchase);
    allowances.grant(advertiser, community, amount);
}

}  // namespace plural
