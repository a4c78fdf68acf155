#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "plural/rank.hpp"
#include "support.hpp"

using namespace plural;
using plural::testing::code_of;

namespace {

ContentId mid(int i) { return ContentId(static_cast<std::uint32_t>(i)); }

std::vector<double> weights_of(const ExposureWeights& w) {
    std::vector<double> out;
    for (const auto& e : w.entries) out.push_back(e.weight);
    return out;
}

double total_share(const std::vector<FeedEntry>& feed) {
    double s = 0.0;
    for (const auto& f : feed) s += f.exposure_share;
    return s;
}

// Ranking inputs for a single citizen built from community ψ tables.
struct OneCitizen {
    SocialFabric fabric;
    ScoreBoard board;
    CitizenId p;
    std::vector<CommunityId> communities;
};

OneCitizen one_citizen(const std::vector<double>& lambdas, const std::vector<double>& raw_devotion,
                       const std::vector<std::vector<double>>& psi) {
    OneCitizen s;
    s.p = s.fabric.add_citizen();
    for (std::size_t c = 0; c < lambdas.size(); ++c) {
        const CommunityId id = s.fabric.add_community(lambdas[c]);
        s.communities.push_back(id);
        s.fabric.add_membership(s.p, id, 1.0, raw_devotion[c]);
        for (std::size_t m = 0; m < psi[c].size(); ++m) {
            ScoreCard card;
            card.content = mid(static_cast<int>(m));
            card.scope = Scope::of(id);
            card.psi = psi[c][m];
            s.board.put(card);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("exposure equation examples") {
    auto a = one_citizen({1.0}, {1.0}, {{0.3, 0.1}});
    const std::vector<ContentId> two{mid(0), mid(1)};
    auto w = weights_of(exposure_weights(a.p, a.fabric, a.board, two, 0));
    CHECK(w[0] == doctest::Approx(0.75));
    CHECK(w[1] == doctest::Approx(0.25));

    auto eq = one_citizen({1.0}, {1.0}, {{0.4, 0.4, 0.4, 0.4}});
    const std::vector<ContentId> four{mid(0), mid(1), mid(2), mid(3)};
    for (double v : weights_of(exposure_weights(eq.p, eq.fabric, eq.board, four, 0))) CHECK(v == doctest::Approx(0.25));

    auto b = one_citizen({1.0, 1.0}, {0.5, 0.5}, {{0.8, 0.4}, {0.0, 0.4}});
    w = weights_of(exposure_weights(b.p, b.fabric, b.board, two, 0));
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(0.5));

    auto zero = one_citizen({1.0}, {1.0}, {{0.0, 0.0, 0.0}});
    const std::vector<ContentId> three{mid(0), mid(1), mid(2)};
    const auto z = exposure_weights(zero.p, zero.fabric, zero.board, three, 0);
    CHECK(z.uniform_fallback);
    for (double v : weights_of(z)) CHECK(v == doctest::Approx(1.0 / 3.0));

    CHECK(code_of([&] { exposure_weights(a.p, a.fabric, a.board, {}, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("exposure equation matches an independent evaluation") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = fixtures::random_exposure_case(rng, 1 + static_cast<int>(rng.below(4)), 8);
        const auto s = fixtures::build_exposure_setup(x);
        const auto got = weights_of(exposure_weights(CitizenId(0), s.fabric, s.board, s.pool, 0));
        const auto want = oracle::exposure_shares(x);
        double sum = 0.0;
        for (std::size_t m = 0; m < got.size(); ++m) {
            CHECK(std::abs(got[m] - want[m]) <= 1e-12);
            sum += got[m];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("exposure is invariant to a common rescaling of every lambda") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        auto x = fixtures::random_exposure_case(rng, 3, 8);
        const auto base = oracle::exposure_shares(x);
        const auto s0 = fixtures::build_exposure_setup(x);
        const auto w0 = weights_of(exposure_weights(CitizenId(0), s0.fabric, s0.board, s0.pool, 0));
        const double k = rng.uniform(0.1, 10.0);
        x.citizen_lambda *= k;
        for (double& l : x.community_lambda) l *= k;
        const auto s1 = fixtures::build_exposure_setup(x);
        const auto w1 = weights_of(exposure_weights(CitizenId(0), s1.fabric, s1.board, s1.pool, 0));
        for (std::size_t m = 0; m < w0.size(); ++m) {
            CHECK(w1[m] == doctest::Approx(w0[m]).epsilon(1e-12));
            CHECK(w0[m] == doctest::Approx(base[m]).epsilon(1e-12));
        }
    }
}

TEST_CASE("raising a community score never lowers that content's exposure") {
    Rng rng(66);
    for (int trial = 0; trial < 300; ++trial) {
        auto x = fixtures::random_exposure_case(rng, 3, 6);
        const auto s0 = fixtures::build_exposure_setup(x);
        const auto w0 = weights_of(exposure_weights(CitizenId(0), s0.fabric, s0.board, s0.pool, 0));
        const auto m = rng.below(6);
        std::size_t c = rng.below(3);
        while (x.raw_devotion[c] <= 0.0) c = (c + 1) % 3;
        x.community_psi[c][m] += rng.uniform(0.0, 1.0);
        const auto s1 = fixtures::build_exposure_setup(x);
        const auto w1 = weights_of(exposure_weights(CitizenId(0), s1.fabric, s1.board, s1.pool, 0));
        CHECK(w1[m] >= w0[m] - 1e-15);
    }
}

// Holds when the citizen's other sources score the pool uniformly; with an
// arbitrary background the top content can lose share (see the counterexample).
TEST_CASE("raising a community's lambda favors its top content") {
    auto skewed = one_citizen({1.0, 1.0}, {1.0, 1.0}, {{1.0, 0.9}, {5.0, 0.0}});
    auto boosted = one_citizen({4.0, 1.0}, {1.0, 1.0}, {{1.0, 0.9}, {5.0, 0.0}});
    const std::vector<ContentId> two{mid(0), mid(1)};
    CHECK(weights_of(exposure_weights(boosted.p, boosted.fabric, boosted.board, two, 0))[0] <
          weights_of(exposure_weights(skewed.p, skewed.fabric, skewed.board, two, 0))[0]);

    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> psi(2, std::vector<double>(6));
        for (double& v : psi[0]) v = rng.uniform(0.0, 1.0);
        std::fill(psi[1].begin(), psi[1].end(), rng.uniform(0.0, 1.0));
        const auto top = static_cast<int>(std::max_element(psi[0].begin(), psi[0].end()) - psi[0].begin());
        double prev = -1.0;
        for (double lambda : {0.0, 0.5, 1.0, 2.0, 8.0}) {
            auto s = one_citizen({lambda, 1.0}, {1.0, 1.0}, psi);
            std::vector<ContentId> pool;
            for (int m = 0; m < 6; ++m) pool.push_back(mid(m));
            const auto w = exposure_weights(s.p, s.fabric, s.board, pool, 0);
            const auto feed = build_feed(s.p, w, 3, 0.0, 1, s.fabric, s.board);
            double share = 0.0;
            for (const auto& f : feed) {
                if (f.content == mid(top)) share = f.exposure_share;
            }
            CHECK(share >= prev - 1e-12);
            prev = share;
        }
    }
}

TEST_CASE("feeds without exploration") {
    auto s = one_citizen({1.0}, {1.0}, {{0.1, 0.5, 0.2, 0.4, 0.3}});
    std::vector<ContentId> pool{mid(0), mid(1), mid(2), mid(3), mid(4)};
    const auto w = exposure_weights(s.p, s.fabric, s.board, pool, 0);

    const auto top = build_feed(s.p, w, 3, 0.0, 9, s.fabric, s.board);
    REQUIRE(top.size() == 3);
    CHECK(top[0].content == mid(1));
    CHECK(top[1].content == mid(3));
    CHECK(top[2].content == mid(4));
    CHECK(top[0].exposure_share == doctest::Approx(0.5 / 1.2));
    CHECK(top[2].exposure_share == doctest::Approx(0.3 / 1.2));
    CHECK(total_share(top) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < top.size(); ++i) CHECK(top[i].rank_position == static_cast<int>(i));

    for (int k : {5, 9}) {
        const auto all = build_feed(s.p, w, k, 0.0, 9, s.fabric, s.board);
        REQUIRE(all.size() == 5);
        for (const auto& f : all) CHECK(f.exposure_share == w.entries[f.content.index()].weight);
    }
}

TEST_CASE("exploration takes epsilon of the attention") {
    std::vector<double> psi{0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
    auto s = one_citizen({1.0}, {1.0}, {psi});
    std::vector<ContentId> pool;
    for (int m = 0; m < 10; ++m) pool.push_back(mid(m));
    const auto w = exposure_weights(s.p, s.fabric, s.board, pool, 0);
    const auto feed = build_feed(s.p, w, 3, 0.1, 4, s.fabric, s.board);
    double exploit = 0.0, explore = 0.0;
    for (const auto& f : feed) (f.exploration ? explore : exploit) += f.exposure_share;
    CHECK(exploit == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(explore == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::count_if(feed.begin(), feed.end(), [](const FeedEntry& f) { return f.exploration; }) ==
          exploration_slots(3, 0.1));
    for (const auto& f : feed) {
        if (f.exploration) CHECK(f.content.index() >= 3);
    }
    for (std::size_t i = 1; i < feed.size(); ++i) {
        CHECK((feed[i - 1].exposure_share > feed[i].exposure_share ||
               (feed[i - 1].exposure_share == feed[i].exposure_share && feed[i - 1].content < feed[i].content)));
    }

    // Same inputs and seed give the same feed.
    const auto again = build_feed(s.p, w, 3, 0.1, 4, s.fabric, s.board);
    REQUIRE(again.size() == feed.size());
    for (std::size_t i = 0; i < feed.size(); ++i) {
        CHECK(again[i].content == feed[i].content);
        CHECK(again[i].exposure_share == feed[i].exposure_share);
    }

    CHECK(exploration_slots(10, 0.0) == 0);
    CHECK(exploration_slots(10, 0.2) == 2);
    CHECK(exploration_slots(10, 0.01) == 1);
    CHECK(code_of([&] { build_feed(s.p, w, 0, 0.1, 4, s.fabric, s.board); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { build_feed(s.p, w, 3, 1.0, 4, s.fabric, s.board); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("feed shares sum to one on random instances") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = fixtures::random_exposure_case(rng, 3, 2 + static_cast<int>(rng.below(15)));
        const auto s = fixtures::build_exposure_setup(x);
        const auto w = exposure_weights(CitizenId(0), s.fabric, s.board, s.pool, 0);
        const int k = 1 + static_cast<int>(rng.below(8));
        const double eps = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 0.5);
        const auto feed = build_feed(CitizenId(0), w, k, eps, trial, s.fabric, s.board);
        CHECK(std::abs(total_share(feed) - 1.0) <= 1e-9);
    }
}

TEST_CASE("provenance tags") {
    auto s = one_citizen({1.0, 1.0}, {1.0, 1.0}, {{0.5, 0.5}, {0.5, 0.5}});
    ScoreCard bridging;
    bridging.content = mid(0);
    bridging.scope = Scope::of(s.communities[0]);
    bridging.psi = 0.5;
    bridging.label = Label::Bridging;
    s.board.put(bridging);
    ScoreCard divisive = bridging;
    divisive.content = mid(1);
    divisive.scope = Scope::of(s.communities[1]);
    divisive.label = Label::Divisive;
    s.board.put(divisive);
    s.board.set_balancing(mid(1), divisive.scope, {mid(0)});

    const auto t0 = provenance_tags(mid(0), s.p, s.fabric, s.board, nullptr);
    REQUIRE(t0.size() == 1);
    CHECK(t0[0].kind == ProvenanceKind::Bridging);
    CHECK(t0[0].balancing_peek.empty());
    const auto t1 = provenance_tags(mid(1), s.p, s.fabric, s.board, nullptr);
    REQUIRE(t1.size() == 1);
    CHECK(t1[0].kind == ProvenanceKind::Divisive);
    CHECK(t1[0].balancing_peek == std::vector<ContentId>{mid(0)});

    ScoreCard own;
    own.content = mid(1);
    own.scope = Scope::of(s.p);
    own.label = Label::Bridging;
    CHECK(provenance_tags(mid(1), s.p, s.fabric, s.board, &own).size() == 2);
}

TEST_CASE("candidate pool") {
    SocialFabric fabric;
    const CitizenId p = fabric.add_citizen();
    const CitizenId q = fabric.add_citizen();
    const CommunityId a = fabric.add_community();
    const CommunityId b = fabric.add_community();
    fabric.add_membership(p, a, 1.0, 1.0);
    ContentCatalog catalog;
    auto post = [&](CitizenId author, CommunityId target) {
        ContentItem item;
        item.creator = author;
        item.target_communities = {target};
        return catalog.add(item);
    };
    const ContentId own = post(p, a);
    const ContentId seen = post(q, a);
    const ContentId fresh = post(q, a);
    const ContentId elsewhere = post(q, b);
    const ContentId exposed = post(q, a);
    ReactionMatrix r;
    r.record_reaction(p, seen, 1, 0);
    r.record_exposure(p, exposed, 0);
    CHECK(candidate_pool(p, fabric, catalog, r) == std::vector<ContentId>{fresh, exposed});
    const ContentId ads[] = {elsewhere};
    CHECK(candidate_pool(p, fabric, catalog, r, ads) == std::vector<ContentId>{fresh, elsewhere, exposed});
    (void)own;
}

TEST_CASE("seeding") {
    SocialFabric fabric;
    const CommunityId c = fabric.add_community(1.0);
    const CitizenId x = fabric.add_citizen();
    const CitizenId y = fabric.add_citizen();
    const CitizenId viewer = fabric.add_citizen();
    const CitizenId outsider = fabric.add_citizen();
    for (CitizenId p : {x, y, viewer}) fabric.add_membership(p, c, 1.0, 1.0);
    ScoreBoard board;
    SeedingAllowances allowances;
    const SeedingParams params;

    CHECK(seed_content(mid(9), c, x, 0.0, fabric, allowances, board, 0, params) == 0.0);
    CHECK_FALSE(board.active_override(mid(9), c, 0).has_value());
    CHECK(fabric.raw_standing(x, c) == 1.0);

    CHECK(seed_content(mid(0), c, x, 0.1, fabric, allowances, board, 0, params) == doctest::Approx(1.0));
    CHECK(seed_content(mid(1), c, y, 0.2, fabric, allowances, board, 0, params) == doctest::Approx(2.0));
    CHECK(fabric.raw_standing(x, c) == doctest::Approx(0.9));
    const std::vector<ContentId> pool{mid(0), mid(1)};
    const auto w = weights_of(exposure_weights(viewer, fabric, board, pool, 0));
    CHECK(w[1] / w[0] == doctest::Approx(2.0));

    // Overrides expire after seed_rounds.
    CHECK(board.psi(mid(0), Scope::of(c), params.seed_rounds - 1) == doctest::Approx(1.0));
    CHECK(board.psi(mid(0), Scope::of(c), params.seed_rounds) == 0.0);

    CHECK(code_of([&] { seed_content(mid(2), c, outsider, 0.1, fabric, allowances, board, 0, params); }) ==
          ErrorCode::InsufficientStanding);
    CHECK(code_of([&] { seed_content(mid(2), c, x, 5.0, fabric, allowances, board, 0, params); }) ==
          ErrorCode::InsufficientStanding);

    const AdvertiserId ad(0);
    CHECK(code_of([&] { seed_content(mid(3), c, ad, 0.1, fabric, allowances, board, 0, params); }) ==
          ErrorCode::InsufficientStanding);
    allowances.grant(ad, c, 0.5);
    CHECK(seed_content(mid(3), c, ad, 0.1, fabric, allowances, board, 0, params) == doctest::Approx(1.0));
    CHECK(allowances.available(ad, c) == doctest::Approx(0.4));
}
