#pragma once

// Builders that turn the plain oracle inputs into library objects.

#include <vector>

#include "oracles.hpp"
#include "plural/fabric.hpp"
#include "plural/rng.hpp"
#include "plural/score.hpp"

namespace plural::fixtures {

inline oracle::ExposureCase random_exposure_case(Rng& rng, int communities, int contents) {
    oracle::ExposureCase x;
    x.citizen_lambda = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 3.0);
    for (int m = 0; m < contents; ++m) x.citizen_psi.push_back(rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 2.0));
    bool member = false;
    for (int c = 0; c < communities; ++c) {
        const bool in = rng.uniform() < 0.7 || (c == communities - 1 && !member);
        member = member || in;
        x.raw_devotion.push_back(in ? rng.uniform(0.05, 4.0) : 0.0);
        x.community_lambda.push_back(rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, 2.0));
        std::vector<double> psi;
        for (int m = 0; m < contents; ++m) psi.push_back(rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 2.0));
        x.community_psi.push_back(psi);
    }
    return x;
}

/// One citizen (id 0) plus the case's communities; ψ values land on the board.
struct ExposureSetup {
    SocialFabric fabric;
    ScoreBoard board;
    std::vector<ContentId> pool;
};

inline ExposureSetup build_exposure_setup(const oracle::ExposureCase& x) {
    ExposureSetup s;
    const CitizenId p = s.fabric.add_citizen(x.citizen_lambda);
    for (std::size_t c = 0; c < x.raw_devotion.size(); ++c) {
        const CommunityId id = s.fabric.add_community(x.community_lambda[c]);
        if (x.raw_devotion[c] > 0.0) s.fabric.add_membership(p, id, 1.0, x.raw_devotion[c]);
        for (std::size_t m = 0; m < x.citizen_psi.size(); ++m) {
            ScoreCard card;
            card.content = ContentId(static_cast<std::uint32_t>(m));
            card.scope = Scope::of(id);
            card.psi = x.community_psi[c][m];
            s.board.put(card);
        }
    }
    for (std::size_t m = 0; m < x.citizen_psi.size(); ++m) {
        ScoreCard card;
        card.content = ContentId(static_cast<std::uint32_t>(m));
        card.scope = Scope::of(p);
        card.psi = x.citizen_psi[m];
        s.board.put(card);
        s.pool.push_back(card.content);
    }
    return s;
}

}  // namespace plural::fixtures
