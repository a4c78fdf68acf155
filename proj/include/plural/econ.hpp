#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plural/content.hpp"
#include "plural/fabric.hpp"
#include "plural/rank.hpp"
#include "plural/score.hpp"

namespace plural {

struct AccountOwner {
    enum class Kind : std::uint8_t { Citizen, Community, Advertiser, Platform, CreatorPool };

    Kind kind = Kind::Platform;
    std::uint32_t id = 0;  // CreatorPool ids are community ids; Platform is always 0

    static AccountOwner of(CitizenId c) { return {Kind::Citizen, c.value}; }
    static AccountOwner of(CommunityId c) { return {Kind::Community, c.value}; }
    static AccountOwner of(AdvertiserId a) { return {Kind::Advertiser, a.value}; }
    static AccountOwner platform() { return {Kind::Platform, 0}; }
    static AccountOwner pool(CommunityId c) { return {Kind::CreatorPool, c.value}; }

    friend auto operator<=>(const AccountOwner&, const AccountOwner&) = default;
};

std::string_view to_string(AccountOwner::Kind kind);

enum class Reason : std::uint8_t {
    ImpressionSponsorship,
    Subscription,
    AdImpression,
    CreatorReward,
    PlatformFee,
    StandingPurchase,
};

std::string_view to_string(Reason reason);

struct LedgerEntry {
    int round = 0;
    AccountOwner from;
    AccountOwner to;
    double amount = 0.0;
    Reason reason = Reason::ImpressionSponsorship;
};

/// Append-only double-entry book. Initial endowments are recorded separately
/// from transfers; no account may go negative.
class Ledger {
public:
    void endow(AccountOwner owner, double amount);

    /// Moves `amount` > 0. Throws InsufficientFunds when `from` cannot cover it.
    void transfer(int round, AccountOwner from, AccountOwner to, double amount, Reason reason);

    double balance(AccountOwner owner) const;
    const std::map<AccountOwner, double>& balances() const { return balances_; }
    const std::map<AccountOwner, double>& endowments() const { return endowments_; }
    const std::vector<LedgerEntry>& entries() const { return entries_; }

private:
    std::map<AccountOwner, double> balances_;
    std::map<AccountOwner, double> endowments_;
    std::vector<LedgerEntry> entries_;
};

/// Independent replay of a ledger: per-round debit and credit totals, the
/// lowest balance reached by any account, and whether replayed balances match.
struct LedgerAudit {
    std::map<int, std::pair<double, double>> round_totals;  // round → (Σ debits, Σ credits)
    double max_round_imbalance = 0.0;
    double min_balance = 0.0;
    bool balances_match = true;
    bool all_positive_amounts = true;

    bool ok(double tol = 1e-9) const {
        return max_round_imbalance <= tol && min_balance >= -tol && balances_match && all_positive_amounts;
    }
};

LedgerAudit audit_ledger(const Ledger& ledger);

struct AdDeal {
    CommunityId community;
    double price_per_impression = 0.0;
    bool accepted = false;

    bool operator==(const AdDeal&) const = default;
};

struct Advertiser {
    AdvertiserId id;
    double budget = 0.0;
    std::vector<AdDeal> deals;
    bool citizen_targeting = false;  // may target citizens who accept personal ads
    double citizen_price_per_impression = 0.0;

    const AdDeal* accepted_deal(CommunityId community) const;

    bool operator==(const Advertiser&) const = default;
};

enum class Funding : std::uint8_t { SelfPaid, AdFunded };
std::string_view to_string(Funding funding);

struct LambdaPolicy {
    AccountOwner owner;  // Citizen or Community
    double lambda = 0.0;
    Funding funding = Funding::SelfPaid;
    double price_per_lambda_impression = 1.0;
};

/// λ settings per sponsor. Changes are staged and take effect at the next
/// round boundary via apply_pending.
class LambdaPolicies {
public:
    /// Throws NoAcceptedDeal when AdFunded is requested without an accepted
    /// advertiser deal for the owner. A citizen who is not a subscriber is
    /// always treated as AdFunded.
    void set_lambda(AccountOwner owner, double lambda, Funding funding, double price,
                    std::span<const Advertiser> advertisers, const SocialFabric& fabric);

    /// Copies staged λ values into the fabric; returns the owners that changed.
    std::vector<AccountOwner> apply_pending(SocialFabric& fabric);

    /// Sets the owner's λ to 0 from the next round on.
    void clamp(AccountOwner owner);

    const LambdaPolicy* find(AccountOwner owner) const;
    double price(AccountOwner owner, double fallback) const;
    const std::map<AccountOwner, LambdaPolicy>& policies() const { return active_; }

private:
    std::map<AccountOwner, LambdaPolicy> active_;
    std::map<AccountOwner, LambdaPolicy> pending_;
};

struct EconParams {
    double platform_fee = 0.3;
    double creator_share = 0.7;
    double price_per_lambda_impression = 1.0;  // default when an owner has no policy
    double reward_rate = 0.1;

    bool operator==(const EconParams&) const = default;
};

struct CitizenFeed {
    CitizenId citizen;
    std::vector<FeedEntry> entries;
};

struct SettlementEvent {
    int round = 0;
    AccountOwner owner;
    std::string what;
};

struct Settlement {
    double sponsor_charges = 0.0;
    double ad_charges = 0.0;
    double platform_revenue = 0.0;
    std::vector<SettlementEvent> events;
};

/// Pay-per-impression settlement of one round. Every feed entry's share is
/// attributed to the sponsors of its numerator terms in proportion to their
/// contribution; each sponsor pays its λ price times the attributed share,
/// split platform_fee → Platform, creator_share → creator, remainder → the
/// community CreatorPool. Ad impressions pay the deal price into the account of
/// the sponsoring owner first. Sponsors that cannot cover their charges pay
/// what they hold and have λ clamped to 0.
Settlement settle_round(int round, std::span<const CitizenFeed> feeds, const SocialFabric& fabric,
                        const ContentCatalog& catalog, LambdaPolicies& policies,
                        std::span<const Advertiser> advertisers, const EconParams& params, Ledger& ledger);

/// Raises each citizen creator's raw standing by reward_rate · ψ(m;c) in every
/// targeted community the creator belongs to, using organic community cards.
void reward_standing(const ScoreBoard& board, const ContentCatalog& catalog, SocialFabric& fabric, double reward_rate);

/// Community representatives sell seeding standing to an advertiser.
/// Throws Unregistered or InsufficientFunds.
void sell_standing(AdvertiserId advertiser, CommunityId community, double amount, double price, int round,
                   Ledger& ledger, const SocialFabric& fabric, SeedingAllowances& allowances);

}  // namespace plural
