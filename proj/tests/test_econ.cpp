#include "doctest.h"

#include <cmath>
#include <vector>

#include "plural/econ.hpp"
#include "plural/rng.hpp"
#include "support.hpp"

using namespace plural;
using plural::testing::code_of;

namespace {

// Citizens, communities and one post per (creator, community) pair, scored in
// their communities and ranked for every citizen.
struct Market {
    SocialFabric fabric;
    ContentCatalog catalog;
    ScoreBoard board;
    LambdaPolicies policies;
    std::vector<Advertiser> advertisers;
    Ledger ledger;
    EconParams params;

    ContentId post(Creator creator, CommunityId target, double psi) {
        ContentItem item;
        item.creator = creator;
        item.target_communities = {target};
        const ContentId id = catalog.add(item);
        ScoreCard card;
        card.content = id;
        card.scope = Scope::of(target);
        card.psi = psi;
        board.put(card);
        return id;
    }

    std::vector<CitizenFeed> feeds(int k = 10) const {
        std::vector<CitizenFeed> out;
        ReactionMatrix none;
        for (const auto& p : fabric.citizens()) {
            const auto pool = candidate_pool(p.id, fabric, catalog, none);
            if (pool.empty()) continue;
            const auto w = exposure_weights(p.id, fabric, board, pool, 0);
            out.push_back({p.id, build_feed(p.id, w, k, 0.0, 0, fabric, board)});
        }
        return out;
    }

    Settlement settle(int round) {
        const auto f = feeds();
        return settle_round(round, f, fabric, catalog, policies, advertisers, params, ledger);
    }
};

}  // namespace

TEST_CASE("single sponsored impression") {
    Market m;
    m.params.platform_fee = 0.3;
    m.params.creator_share = 0.7;
    const CommunityId c = m.fabric.add_community(1.0);
    const CitizenId viewer = m.fabric.add_citizen();
    const CitizenId creator = m.fabric.add_citizen();
    m.fabric.add_membership(viewer, c, 1.0, 1.0);
    m.post(creator, c, 0.5);
    m.ledger.endow(AccountOwner::of(c), 10.0);

    const auto s = m.settle(0);
    CHECK(m.ledger.balance(AccountOwner::of(c)) == doctest::Approx(9.0));
    CHECK(m.ledger.balance(AccountOwner::platform()) == doctest::Approx(0.3));
    CHECK(m.ledger.balance(AccountOwner::of(creator)) == doctest::Approx(0.7));
    CHECK(m.ledger.entries().size() == 2);
    CHECK(s.platform_revenue == doctest::Approx(0.3));
    CHECK(s.events.empty());
    for (const auto& e : m.ledger.entries()) CHECK(e.from == AccountOwner::of(c));
}

TEST_CASE("no lambda, no money") {
    Market m;
    const CommunityId c = m.fabric.add_community(0.0);
    const CitizenId viewer = m.fabric.add_citizen();
    m.fabric.add_membership(viewer, c, 1.0, 1.0);
    m.post(m.fabric.add_citizen(), c, 0.5);
    m.post(m.fabric.add_citizen(), c, 0.2);
    m.ledger.endow(AccountOwner::of(c), 10.0);
    m.settle(0);
    CHECK(m.ledger.entries().empty());
}

TEST_CASE("pool remainder and subscriptions") {
    Market m;
    m.params.platform_fee = 0.2;
    m.params.creator_share = 0.5;
    const CommunityId c = m.fabric.add_community(1.0);
    const CitizenId viewer = m.fabric.add_citizen(1.0, true);
    const CitizenId creator = m.fabric.add_citizen();
    m.fabric.add_membership(viewer, c, 1.0, 1.0);
    m.post(creator, c, 0.5);
    ScoreCard own;
    own.content = ContentId(0);
    own.scope = Scope::of(viewer);
    own.psi = 1.5;
    m.board.put(own);
    m.ledger.endow(AccountOwner::of(c), 10.0);
    m.ledger.endow(AccountOwner::of(viewer), 10.0);
    m.settle(0);
    // Numerator terms 1.5 (citizen) and 0.5 (community) split one impression 3:1.
    CHECK(m.ledger.balance(AccountOwner::of(viewer)) == doctest::Approx(10.0 - 0.75));
    CHECK(m.ledger.balance(AccountOwner::of(c)) == doctest::Approx(10.0 - 0.25));
    CHECK(m.ledger.balance(AccountOwner::of(creator)) == doctest::Approx(0.5));
    CHECK(m.ledger.balance(AccountOwner::pool(c)) == doctest::Approx(0.3));
    CHECK(m.ledger.balance(AccountOwner::platform()) == doctest::Approx(0.2));
    bool subscription = false;
    for (const auto& e : m.ledger.entries()) subscription |= e.reason == Reason::Subscription;
    CHECK(subscription);
}

TEST_CASE("attribution shares sum to one per entry") {
    Rng rng(3);
    Market m;
    for (int i = 0; i < 4; ++i) m.fabric.add_community(rng.uniform(0.1, 2.0));
    for (int i = 0; i < 12; ++i) {
        const CitizenId p = m.fabric.add_citizen();
        for (std::uint32_t c = 0; c < 4; ++c) {
            if (rng.uniform() < 0.5 || c == p.value % 4) m.fabric.add_membership(p, CommunityId(c), 1.0, rng.uniform(0.1, 3.0));
        }
    }
    for (int i = 0; i < 20; ++i) {
        m.post(CitizenId(static_cast<std::uint32_t>(rng.below(12))), CommunityId(static_cast<std::uint32_t>(rng.below(4))),
               rng.uniform(0.0, 1.0));
    }
    for (const auto& feed : m.feeds()) {
        for (const auto& e : feed.entries) {
            const double num = e.terms.numerator();
            if (num <= 0.0) continue;
            double sum = e.terms.citizen / num;
            for (const auto& [_, t] : e.terms.communities) sum += t / num;
            CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("random markets conserve money and never go negative") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        Market m;
        m.params.platform_fee = rng.uniform(0.0, 0.5);
        m.params.creator_share = rng.uniform(0.0, 1.0 - m.params.platform_fee);
        const int communities = 1 + static_cast<int>(rng.below(4));
        for (int i = 0; i < communities; ++i) {
            const CommunityId c = m.fabric.add_community(0.0, true);
            m.policies.set_lambda(AccountOwner::of(c), rng.uniform(0.0, 2.0), Funding::SelfPaid, rng.uniform(0.1, 2.0),
                                  m.advertisers, m.fabric);
            m.ledger.endow(AccountOwner::of(c), rng.uniform(0.0, 5.0));
        }
        for (int i = 0; i < 15; ++i) {
            const CitizenId p = m.fabric.add_citizen(0.0, rng.uniform() < 0.5);
            m.fabric.add_membership(p, CommunityId(static_cast<std::uint32_t>(rng.below(communities))), 1.0, 1.0);
            if (m.fabric.citizen(p).subscriber) {
                m.policies.set_lambda(AccountOwner::of(p), rng.uniform(0.0, 1.0), Funding::SelfPaid, 1.0, m.advertisers,
                                      m.fabric);
                m.ledger.endow(AccountOwner::of(p), rng.uniform(0.0, 1.0));
            }
        }
        for (int i = 0; i < 25; ++i) {
            const ContentId id = m.post(CitizenId(static_cast<std::uint32_t>(rng.below(15))),
                                        CommunityId(static_cast<std::uint32_t>(rng.below(communities))),
                                        rng.uniform(0.0, 1.0));
            for (const auto& p : m.fabric.citizens()) {
                if (p.lambda >= 0.0 && rng.uniform() < 0.3) {
                    ScoreCard card;
                    card.content = id;
                    card.scope = Scope::of(p.id);
                    card.psi = rng.uniform(0.0, 1.0);
                    m.board.put(card);
                }
            }
        }
        for (int round = 0; round < 6; ++round) {
            m.policies.apply_pending(m.fabric);
            m.settle(round);
            const auto audit = audit_ledger(m.ledger);
            CHECK(audit.ok());
            CHECK(audit.max_round_imbalance <= 1e-9);
            for (const auto& [owner, balance] : m.ledger.balances()) CHECK(balance >= 0.0);
        }
    }
}

TEST_CASE("running out of money clamps lambda") {
    Market m;
    const CommunityId c = m.fabric.add_community(0.0);
    m.policies.set_lambda(AccountOwner::of(c), 1.0, Funding::SelfPaid, 1.0, m.advertisers, m.fabric);
    m.policies.apply_pending(m.fabric);
    const CitizenId viewer = m.fabric.add_citizen();
    m.fabric.add_membership(viewer, c, 1.0, 1.0);
    const CitizenId creator = m.fabric.add_citizen();
    m.post(creator, c, 0.5);
    m.ledger.endow(AccountOwner::of(c), 0.4);

    const auto s = m.settle(0);
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0].owner == AccountOwner::of(c));
    CHECK(s.events[0].what == "insufficient funds; lambda clamped to 0");
    CHECK(m.ledger.balance(AccountOwner::of(c)) == 0.0);
    CHECK(m.ledger.balance(AccountOwner::platform()) + m.ledger.balance(AccountOwner::of(creator)) ==
          doctest::Approx(0.4));
    CHECK(m.fabric.community(c).lambda == 1.0);
    m.policies.apply_pending(m.fabric);
    CHECK(m.fabric.community(c).lambda == 0.0);
    m.settle(1);
    CHECK(audit_ledger(m.ledger).ok());
}

TEST_CASE("setting lambda") {
    SocialFabric fabric;
    const CommunityId c = fabric.add_community();
    const CitizenId sub = fabric.add_citizen(0.0, true);
    const CitizenId free_rider = fabric.add_citizen(0.0, false, false);
    const CitizenId ad_viewer = fabric.add_citizen(0.0, false, true);
    std::vector<Advertiser> none;
    LambdaPolicies policies;

    CHECK(code_of([&] { policies.set_lambda(AccountOwner::of(c), 1.0, Funding::AdFunded, 1.0, none, fabric); }) ==
          ErrorCode::NoAcceptedDeal);
    CHECK(code_of([&] { policies.set_lambda(AccountOwner::of(c), -1.0, Funding::SelfPaid, 1.0, none, fabric); }) ==
          ErrorCode::InvalidArgument);

    policies.set_lambda(AccountOwner::of(sub), 1.0, Funding::SelfPaid, 1.0, none, fabric);
    CHECK(fabric.citizen(sub).lambda == 0.0);  // staged until the round boundary
    policies.apply_pending(fabric);
    CHECK(fabric.citizen(sub).lambda == 1.0);
    policies.set_lambda(AccountOwner::of(sub), 0.0, Funding::SelfPaid, 1.0, none, fabric);
    policies.apply_pending(fabric);
    CHECK(fabric.citizen(sub).lambda == 0.0);

    CHECK(code_of([&] { policies.set_lambda(AccountOwner::of(free_rider), 1.0, Funding::SelfPaid, 1.0, none, fabric); }) ==
          ErrorCode::NoAcceptedDeal);
    policies.set_lambda(AccountOwner::of(free_rider), 0.0, Funding::SelfPaid, 1.0, none, fabric);

    std::vector<Advertiser> ads{{AdvertiserId(0), 10.0, {{c, 0.2, true}}, true, 0.1}};
    policies.set_lambda(AccountOwner::of(c), 1.0, Funding::AdFunded, 1.0, ads, fabric);
    policies.set_lambda(AccountOwner::of(ad_viewer), 0.5, Funding::SelfPaid, 1.0, ads, fabric);
    policies.apply_pending(fabric);
    REQUIRE(policies.find(AccountOwner::of(ad_viewer)) != nullptr);
    CHECK(policies.find(AccountOwner::of(ad_viewer))->funding == Funding::AdFunded);
    CHECK(fabric.community(c).lambda == 1.0);
}

TEST_CASE("ad impressions pay the sponsoring community") {
    Market m;
    m.params.platform_fee = 0.3;
    m.params.creator_share = 0.7;
    const CommunityId c = m.fabric.add_community(1.0, true);
    const CitizenId viewer = m.fabric.add_citizen();
    m.fabric.add_membership(viewer, c, 1.0, 1.0);
    m.advertisers.push_back({AdvertiserId(0), 5.0, {{c, 0.4, true}}, false, 0.0});
    m.ledger.endow(AccountOwner::of(AdvertiserId(0)), 5.0);
    m.post(AdvertiserId(0), c, 1.0);
    m.settle(0);
    // The ad pays 0.4 to the community, which pays 1.0 for the impression.
    CHECK(m.ledger.balance(AccountOwner::of(AdvertiserId(0))) == doctest::Approx(4.6));
    CHECK(m.ledger.balance(AccountOwner::of(c)) == 0.0);
    CHECK(m.ledger.balance(AccountOwner::platform()) == doctest::Approx(0.3 * 0.4));
    CHECK(audit_ledger(m.ledger).ok());
}

TEST_CASE("creator revenue is monotone in score") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> psi(6);
        for (double& v : psi) v = rng.uniform(0.0, 1.0);
        const auto target = rng.below(6);
        double prev = -1.0;
        for (double bump : {0.0, 0.1, 0.5, 2.0}) {
            Market m;
            const CommunityId c = m.fabric.add_community(1.0);
            for (int i = 0; i < 4; ++i) m.fabric.add_membership(m.fabric.add_citizen(), c, 1.0, 1.0);
            std::vector<CitizenId> creators;
            for (int i = 0; i < 6; ++i) creators.push_back(m.fabric.add_citizen());
            for (int i = 0; i < 6; ++i) m.post(creators[i], c, psi[i] + (i == static_cast<int>(target) ? bump : 0.0));
            m.ledger.endow(AccountOwner::of(c), 100.0);
            m.settle(0);
            const double revenue = m.ledger.balance(AccountOwner::of(creators[target]));
            CHECK(revenue >= prev - 1e-12);
            prev = revenue;
        }
    }
}

TEST_CASE("standing rewards") {
    SocialFabric fabric;
    const CommunityId c = fabric.add_community();
    const CitizenId a = fabric.add_citizen();
    const CitizenId b = fabric.add_citizen();
    fabric.add_membership(a, c, 1.0, 1.0);
    fabric.add_membership(b, c, 1.0, 1.0);
    ContentCatalog catalog;
    ScoreBoard board;
    auto post = [&](CitizenId who, double psi) {
        ContentItem item;
        item.creator = who;
        item.target_communities = {c};
        const ContentId id = catalog.add(item);
        ScoreCard card;
        card.content = id;
        card.scope = Scope::of(c);
        card.psi = psi;
        board.put(card);
    };

    post(a, 0.0);
    reward_standing(board, catalog, fabric, 0.1);
    CHECK(fabric.raw_standing(a, c) == 1.0);

    post(a, 2.0);
    reward_standing(board, catalog, fabric, 0.1);
    CHECK(fabric.raw_standing(a, c) == doctest::Approx(1.2));
    CHECK(fabric.standing(a, c) > 0.5);
    CHECK(fabric.standing(b, c) < 0.5);

    SocialFabric even;
    const CommunityId e = even.add_community();
    const CitizenId x = even.add_citizen();
    const CitizenId y = even.add_citizen();
    even.add_membership(x, e, 1.0, 1.0);
    even.add_membership(y, e, 1.0, 1.0);
    ContentCatalog cat2;
    ScoreBoard board2;
    for (auto [who, psi] : {std::pair{x, 0.8}, std::pair{y, 0.4}}) {
        ContentItem item;
        item.creator = who;
        item.target_communities = {e};
        ScoreCard card;
        card.content = cat2.add(item);
        card.scope = Scope::of(e);
        card.psi = psi;
        board2.put(card);
    }
    reward_standing(board2, cat2, even, 0.5);
    CHECK((even.raw_standing(x, e) - 1.0) / (even.raw_standing(y, e) - 1.0) == doctest::Approx(2.0));
    CHECK(code_of([&] { reward_standing(board2, cat2, even, -1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("selling standing") {
    SocialFabric fabric;
    const CommunityId open = fabric.add_community(0.0, false);
    const CommunityId run = fabric.add_community(0.0, true);
    Ledger ledger;
    SeedingAllowances allowances;
    const AdvertiserId ad(0);
    ledger.endow(AccountOwner::of(ad), 3.0);

    CHECK(code_of([&] { sell_standing(ad, open, 1.0, 1.0, 0, ledger, fabric, allowances); }) == ErrorCode::Unregistered);
    CHECK(code_of([&] { sell_standing(ad, run, 1.0, 5.0, 0, ledger, fabric, allowances); }) ==
          ErrorCode::InsufficientFunds);
    sell_standing(ad, run, 0.5, 2.0, 0, ledger, fabric, allowances);
    CHECK(ledger.balance(AccountOwner::of(ad)) == doctest::Approx(1.0));
    CHECK(ledger.balance(AccountOwner::of(run)) == doctest::Approx(2.0));
    CHECK(allowances.available(ad, run) == doctest::Approx(0.5));
    REQUIRE(ledger.entries().size() == 1);
    CHECK(ledger.entries()[0].reason == Reason::StandingPurchase);
}

TEST_CASE("ledger guards") {
    Ledger ledger;
    ledger.endow(AccountOwner::of(CitizenId(0)), 1.0);
    CHECK(code_of([&] {
        ledger.transfer(0, AccountOwner::of(CitizenId(0)), AccountOwner::platform(), 2.0, Reason::PlatformFee);
    }) == ErrorCode::InsufficientFunds);
    CHECK(code_of([&] {
        ledger.transfer(0, AccountOwner::of(CitizenId(0)), AccountOwner::of(CitizenId(0)), 0.5, Reason::PlatformFee);
    }) == ErrorCode::InvalidArgument);
    CHECK(ledger.entries().empty());
    CHECK(audit_ledger(ledger).ok());
}
