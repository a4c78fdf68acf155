#include "plural/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <set>

#include "plural/detect.hpp"
#include "plural/error.hpp"
#include "plural/numeric.hpp"
#include "plural/parallel.hpp"

namespace plural {

double AgentState::belief(ContentId m) const {
    auto it = beliefs.find(m);
    return it == beliefs.end() ? 0.0 : it->second;
}

double attitude(std::span<const double> ideology, std::span<const double> position, double temperature, double bias) {
    require(ideology.size() == position.size(), ErrorCode::InvalidArgument, "ideology and content dimensions differ");
    require(temperature > 0.0, ErrorCode::InvalidArgument, "temperature must be positive");
    double d2 = 0.0;
    for (std::size_t i = 0; i < ideology.size(); ++i) {
        const double d = ideology[i] - position[i];
        d2 += d * d;
    }
    return logistic(bias - d2 / temperature);
}

int react(double attitude_value, double exposure_share, Rng& rng, double engagement_scale) {
    const double engage = std::clamp(engagement_scale * exposure_share, 0.0, 1.0);
    if (!rng.bernoulli(engage)) return 0;
    return rng.bernoulli(attitude_value) ? 1 : -1;
}

double aggregate_belief(std::span<const MemberBelief> members, std::span<const MemberSet> blocs) {
    require(!members.empty(), ErrorCode::EmptyCommunity, "cannot aggregate belief over an empty scope");
    auto lookup = [&](CitizenId c) -> const MemberBelief* {
        auto it = std::lower_bound(members.begin(), members.end(), c,
                                   [](const MemberBelief& m, CitizenId id) { return m.citizen < id; });
        return it != members.end() && it->citizen == c ? &*it : nullptr;
    };

    std::vector<double> means;
    std::vector<double> sizes;
    std::vector<double> values;
    std::vector<double> weights;
    for (const auto& bloc : blocs) {
        values.clear();
        weights.clear();
        for (CitizenId c : bloc) {
            if (const MemberBelief* m = lookup(c)) {
                values.push_back(m->belief);
                weights.push_back(m->standing);
            }
        }
        if (values.empty()) continue;
        means.push_back(weighted_arithmetic_mean(values, weights));
        sizes.push_back(static_cast<double>(values.size()));
    }
    if (!means.empty()) return weighted_geometric_mean(means, sqrt_size_weights(sizes));

    values.clear();
    weights.clear();
    for (const auto& m : members) {
        values.push_back(m.belief);
        weights.push_back(m.standing);
    }
    return weighted_geometric_mean(values, weights);
}

std::vector<ContentId> top_exposed_contents(const std::map<ContentId, double>& exposure, std::size_t n) {
    std::vector<std::pair<ContentId, double>> ranked(exposure.begin(), exposure.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<ContentId> out;
    for (std::size_t i = 0; i < ranked.size() && i < n; ++i) {
        if (ranked[i].second > 0.0) out.push_back(ranked[i].first);
    }
    return out;
}

Population gen_population(const ScenarioConfig& config, std::uint64_t seed) {
    const auto& pc = config.population;
    Population pop;
    if (pc.citizens == 0) return pop;
    require(!pc.blocs.empty(), ErrorCode::InvalidArgument, "population needs at least one bloc");

    // Largest-remainder apportionment of citizens to blocs.
    double share_total = 0.0;
    for (const auto& b : pc.blocs) share_total += b.share;
    std::vector<int> counts(pc.blocs.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t b = 0; b < pc.blocs.size(); ++b) {
        const double exact = pc.citizens * pc.blocs[b].share / share_total;
        counts[b] = static_cast<int>(std::floor(exact));
        assigned += counts[b];
        remainders.emplace_back(exact - counts[b], b);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < pc.citizens; ++i, ++assigned) ++counts[remainders[i % remainders.size()].second];

    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Population)}));
    for (std::size_t b = 0; b < pc.blocs.size(); ++b) {
        const auto& tmpl = pc.blocs[b];
        for (int i = 0; i < counts[b]; ++i) {
            const bool subscriber = rng.bernoulli(pc.subscriber_share);
            const bool personal_ads = rng.bernoulli(pc.personal_ads_share);
            const CitizenId id = pop.fabric.add_citizen(0.0, subscriber, personal_ads);
            AgentState agent;
            agent.citizen = id;
            agent.bloc = static_cast<int>(b);
            for (double x : tmpl.center) agent.ideology.push_back(rng.normal(x, tmpl.sigma));
            pop.agents.push_back(std::move(agent));
        }
    }

    for (const auto& tmpl : config.communities) {
        const CommunityId c = pop.fabric.add_community(0.0, tmpl.admin_registered);
        std::vector<MemberSet> planted(tmpl.blocs.size());
        for (const auto& agent : pop.agents) {
            auto pos = std::find(tmpl.blocs.begin(), tmpl.blocs.end(), agent.bloc);
            if (pos == tmpl.blocs.end()) continue;
            const bool joins = rng.bernoulli(tmpl.membership_rate);
            const double devotion = rng.uniform(pc.devotion_min, pc.devotion_max);
            if (!joins) continue;
            pop.fabric.add_membership(agent.citizen, c, pc.initial_standing, devotion);
            planted[static_cast<std::size_t>(pos - tmpl.blocs.begin())].push_back(agent.citizen);
        }
        pop.planted_blocs.push_back(std::move(planted));
    }
    return pop;
}

namespace {

// Everything one citizen produces during the parallel rank/react phase.
struct CitizenRound {
    std::vector<FeedEntry> feed;
    std::vector<int> reactions;
    std::vector<double> attitudes;  // attitude used for each feed entry
};

class Simulation {
public:
    explicit Simulation(const ScenarioConfig& config) : cfg_(config) {
        out_.population = gen_population(cfg_, cfg_.seed);
        setup_economy();
        base_communities_ = cfg_.population.citizens == 0 ? 0 : cfg_.communities.size();
        community_exposure_.resize(base_communities_);
    }

    RunResult finish() { return std::move(out_); }

    void round(int t) {
        auto& fabric = out_.population.fabric;
        if (t > 0) out_.policies.apply_pending(fabric);
        out_.board.expire_overrides(t);
        post(t);
        refresh_blocs(t);
        score(t);
        std::vector<CitizenRound> results = rank_and_react(t);
        apply(t, results);
        const Settlement s = settle_round(t, out_.feeds.back(), fabric, out_.catalog, out_.policies,
                                          out_.advertisers, cfg_.econ, out_.ledger);
        out_.events.insert(out_.events.end(), s.events.begin(), s.events.end());
        reward_standing(out_.board, out_.catalog, fabric, cfg_.econ.reward_rate);
        out_.metrics.push_back(metrics(t, s.platform_revenue));
    }

private:
    void setup_economy() {
        auto& fabric = out_.population.fabric;
        for (std::size_t i = 0; i < cfg_.content.advertisers.size(); ++i) {
            const auto& a = cfg_.content.advertisers[i];
            Advertiser ad;
            ad.id = AdvertiserId(static_cast<std::uint32_t>(i));
            ad.budget = a.budget;
            for (const auto& d : a.deals) ad.deals.push_back({CommunityId(static_cast<std::uint32_t>(d.community)), d.price, d.accepted});
            ad.citizen_targeting = a.citizen_targeting;
            ad.citizen_price_per_impression = a.citizen_price;
            out_.ledger.endow(AccountOwner::of(ad.id), a.budget);
            out_.advertisers.push_back(std::move(ad));
        }
        if (fabric.citizen_count() == 0) return;
        for (std::size_t i = 0; i < cfg_.communities.size(); ++i) {
            const auto& t = cfg_.communities[i];
            const CommunityId c(static_cast<std::uint32_t>(i));
            out_.ledger.endow(AccountOwner::of(c), t.balance);
            if (t.lambda > 0.0) {
                out_.policies.set_lambda(AccountOwner::of(c), t.lambda, t.funding, t.price, out_.advertisers, fabric);
            }
        }
        const auto& pc = cfg_.population;
        for (const auto& citizen : fabric.citizens()) {
            out_.ledger.endow(AccountOwner::of(citizen.id), pc.citizen_balance);
            if (pc.citizen_lambda <= 0.0) continue;
            try {
                out_.policies.set_lambda(AccountOwner::of(citizen.id), pc.citizen_lambda, pc.citizen_funding,
                                         pc.citizen_price, out_.advertisers, fabric);
            } catch (const Error& e) {
                // Free riders without an ad deal keep λ = 0 but still see community-sponsored content.
                if (e.code() != ErrorCode::NoAcceptedDeal) throw;
            }
        }
        out_.policies.apply_pending(fabric);
        for (std::size_t i = 0; i < cfg_.content.advertisers.size(); ++i) {
            for (const auto& buy : cfg_.content.advertisers[i].standing_purchases) {
                sell_standing(AdvertiserId(static_cast<std::uint32_t>(i)),
                              CommunityId(static_cast<std::uint32_t>(buy.community)), buy.amount, buy.price, 0,
                              out_.ledger, fabric, allowances_);
            }
        }
    }

    void post(int t) {
        auto& fabric = out_.population.fabric;
        const auto& cc = cfg_.content;
        Rng rng(derive_seed(cfg_.seed, {static_cast<std::uint64_t>(Stream::Content), static_cast<std::uint64_t>(t)}));

        std::vector<CitizenId> creators;
        for (const auto& c : fabric.citizens()) {
            if (!c.memberships.empty()) creators.push_back(c.id);
        }
        for (int i = 0; i < cc.posts_per_round && !creators.empty(); ++i) {
            const CitizenId author = creators[rng.below(creators.size())];
            const AgentState& agent = out_.population.agents[author.index()];
            ContentItem item;
            item.creator = author;
            item.created_round = t;
            item.topics = {TopicId(static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(cc.topics))))};
            for (const auto& [c, _] : fabric.citizen(author).memberships) {
                if (!fabric.community(c).derived_from) item.target_communities.push_back(c);
            }
            std::vector<double> position;
            for (double x : agent.ideology) position.push_back(rng.normal(x, cc.position_noise));
            item.latent_position = std::move(position);
            const double stake = cc.stake_max > 0.0 ? rng.uniform(cc.stake_min, cc.stake_max) : 0.0;
            const CommunityId home = item.target_communities.front();
            const ContentId id = out_.catalog.add(std::move(item));
            // Creators only stake what they can afford; the rest post unseeded.
            if (stake > 0.0 && fabric.raw_standing(author, home) - stake >= kStandingFloor) {
                seed_content(id, home, author, stake, fabric, allowances_, out_.board, t, cfg_.ranking.seeding);
            }
        }

        for (std::size_t a = 0; a < cc.advertisers.size(); ++a) {
            const auto& ac = cc.advertisers[a];
            const Advertiser& ad = out_.advertisers[a];
            std::vector<CommunityId> targets;
            for (const auto& d : ad.deals) {
                if (d.accepted) targets.push_back(d.community);
            }
            if (targets.empty()) continue;
            for (int i = 0; i < ac.ads_per_round; ++i) {
                ContentItem item;
                item.creator = ad.id;
                item.created_round = t;
                item.topics = {TopicId(static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(cc.topics))))};
                item.target_communities = targets;
                std::vector<double> position;
                for (int d = 0; d < cfg_.population.dimensions; ++d) position.push_back(rng.normal(0.0, ac.position_spread));
                item.latent_position = std::move(position);
                const ContentId id = out_.catalog.add(std::move(item));
                if (ac.stake <= 0.0) continue;
                for (CommunityId c : targets) {
                    if (allowances_.available(ad.id, c) >= ac.stake) {
                        seed_content(id, c, ad.id, ac.stake, fabric, allowances_, out_.board, t, cfg_.ranking.seeding);
                    }
                }
            }
        }
    }

    void refresh_blocs(int t) {
        auto& fabric = out_.population.fabric;
        const auto& dc = cfg_.scoring.detect;
        for (std::size_t i = 0; i < base_communities_; ++i) {
            const CommunityId c(static_cast<std::uint32_t>(i));
            const Community& community = fabric.community(c);
            // Retry every round until a split exists, then on the refresh cadence.
            const bool due = community.principal_subcommunities.empty() || t % cfg_.sim.refresh_interval == 0;
            if (!due || community.members.size() < 4) continue;

            std::vector<std::pair<int, ContentId>> columns;
            for (const auto& [m, row] : out_.reactions.rows()) {
                int reactors = 0;
                for (const auto& [p, rec] : row) {
                    if (rec.reaction != 0 && community.contains(p)) ++reactors;
                }
                if (reactors >= dc.min_reactors) columns.emplace_back(-reactors, m);
            }
            if (columns.size() < 2) continue;
            std::sort(columns.begin(), columns.end());
            if (columns.size() > static_cast<std::size_t>(dc.max_columns)) columns.resize(static_cast<std::size_t>(dc.max_columns));
            std::vector<ContentId> picked;
            for (const auto& [_, m] : columns) picked.push_back(m);
            std::sort(picked.begin(), picked.end());

            const AttitudeMatrix data = AttitudeMatrix::from_reactions(out_.reactions, community.members, picked);
            try {
                principal_subcommunities(fabric, c, data,
                                         derive_seed(cfg_.seed, {static_cast<std::uint64_t>(Stream::Detect),
                                                                 static_cast<std::uint64_t>(t), i}));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::TooSmall && e.code() != ErrorCode::DegenerateInput) throw;
            }
        }
    }

    void score(int t) {
        const auto& fabric = out_.population.fabric;
        auto& board = out_.board;
        board.clear_cards();
        std::vector<std::vector<ScoreCard>> per_community(base_communities_);
        parallel_for(base_communities_, [&](std::size_t i) {
            const CommunityId c(static_cast<std::uint32_t>(i));
            if (fabric.community(c).members.empty()) return;
            std::vector<ContentId> contents;
            for (const auto& item : out_.catalog.items()) {
                if (item.targets(c)) contents.push_back(item.id);
            }
            ScoreParams params = cfg_.scoring.params;
            params.mf.seed = derive_seed(cfg_.seed ^ params.mf.seed,
                                         {static_cast<std::uint64_t>(Stream::Score), static_cast<std::uint64_t>(t)});
            per_community[i] = score_community(fabric, c, out_.reactions, contents, params, t);
        });
        for (auto& cards : per_community) {
            for (const auto& card : cards) {
                if (card.label != Label::Divisive) continue;
                board.set_balancing(card.content, card.scope,
                                    balancing_set(card, cards, out_.catalog, cfg_.scoring.balancing_topic_overlap,
                                                  cfg_.scoring.balancing_delta_tol));
            }
            for (auto& card : cards) board.put(std::move(card));
        }

        // Citizen-scope cards feed the ranking only for citizens who bought λ.
        std::vector<CitizenId> buyers;
        for (const auto& c : fabric.citizens()) {
            if (c.lambda > 0.0 && !c.memberships.empty()) buyers.push_back(c.id);
        }
        std::vector<std::vector<ScoreCard>> per_citizen(buyers.size());
        parallel_for(buyers.size(), [&](std::size_t i) {
            const CitizenId p = buyers[i];
            const auto ads = personal_ads(p);
            for (ContentId m : candidate_pool(p, fabric, out_.catalog, out_.reactions, ads)) {
                per_citizen[i].push_back(citizen_score(m, p, fabric, out_.reactions, cfg_.scoring.params, t));
            }
        });
        for (auto& cards : per_citizen) {
            for (auto& card : cards) board.put(std::move(card));
        }
    }

    std::vector<ContentId> personal_ads(CitizenId citizen) const {
        std::vector<ContentId> ads;
        if (!out_.population.fabric.citizen(citizen).accepts_personal_ads) return ads;
        for (const auto& item : out_.catalog.items()) {
            const auto* a = std::get_if<AdvertiserId>(&item.creator);
            if (a && out_.advertisers[a->index()].citizen_targeting) ads.push_back(item.id);
        }
        return ads;
    }

    double current_attitude(const AgentState& agent, const ContentItem& item) const {
        if (auto it = agent.attitudes.find(item.id); it != agent.attitudes.end()) return it->second;
        return attitude(agent.ideology, *item.latent_position, cfg_.sim.temperature, cfg_.sim.attitude_bias);
    }

    std::vector<CitizenRound> rank_and_react(int t) {
        const auto& fabric = out_.population.fabric;
        std::vector<CitizenRound> results(fabric.citizen_count());
        parallel_for(fabric.citizen_count(), [&](std::size_t i) {
            const CitizenId p(static_cast<std::uint32_t>(i));
            const Citizen& citizen = fabric.citizen(p);
            if (citizen.memberships.empty()) return;
            const auto ads = personal_ads(p);
            const auto pool = candidate_pool(p, fabric, out_.catalog, out_.reactions, ads);
            if (pool.empty()) return;
            const auto weights = exposure_weights(p, fabric, out_.board, pool, t);
            auto& r = results[i];
            r.feed = build_feed(p, weights, cfg_.ranking.k, cfg_.ranking.epsilon,
                                derive_seed(cfg_.seed, {static_cast<std::uint64_t>(Stream::Feed),
                                                        static_cast<std::uint64_t>(t), i}),
                                fabric, out_.board);
            if (citizen.lambda == 0.0) {
                // Citizen-scope provenance for what is actually shown.
                for (auto& entry : r.feed) {
                    const ScoreCard own = citizen_score(entry.content, p, fabric, out_.reactions, cfg_.scoring.params, t);
                    entry.provenance = provenance_tags(entry.content, p, fabric, out_.board, &own);
                }
            }
            Rng rng(derive_seed(cfg_.seed, {static_cast<std::uint64_t>(Stream::React), static_cast<std::uint64_t>(t), i}));
            const AgentState& agent = out_.population.agents[i];
            for (const auto& entry : r.feed) {
                const double a = current_attitude(agent, out_.catalog.get(entry.content));
                r.attitudes.push_back(a);
                r.reactions.push_back(react(a, entry.exposure_share, rng, cfg_.sim.engagement_scale));
            }
        });
        return results;
    }

    void apply(int t, std::vector<CitizenRound>& results) {
        const auto& fabric = out_.population.fabric;
        auto& agents = out_.population.agents;
        std::vector<CitizenFeed> feeds;
        for (std::size_t i = 0; i < results.size(); ++i) {
            const CitizenId p(static_cast<std::uint32_t>(i));
            auto& r = results[i];
            AgentState& agent = agents[i];
            for (std::size_t j = 0; j < r.feed.size(); ++j) {
                const auto& e = r.feed[j];
                if (r.reactions[j] != 0) out_.reactions.record_reaction(p, e.content, r.reactions[j], t);
                else out_.reactions.record_exposure(p, e.content, t);
                agent.attitudes.emplace(e.content, r.attitudes[j]);
                double& cum = agent.exposure[e.content];
                cum = std::min(1.0, cum + e.exposure_share);
                content_exposure_[e.content] += e.exposure_share;
                for (const auto& [c, _] : fabric.citizen(p).memberships) {
                    if (c.index() < base_communities_) community_exposure_[c.index()][e.content] += e.exposure_share;
                }
            }
            if (!r.feed.empty()) feeds.push_back({p, std::move(r.feed)});
        }
        relax_attitudes(feeds);
        for (auto& agent : agents) {
            for (const auto& [m, a] : agent.attitudes) agent.beliefs[m] = a * agent.exposure[m];
        }
        out_.feeds.push_back(std::move(feeds));
    }

    // Pulls the attitude toward each shown content part of the way to the
    // devotion-weighted common belief of the viewer's communities.
    void relax_attitudes(const std::vector<CitizenFeed>& feeds) {
        const double gamma = cfg_.sim.gamma;
        if (gamma == 0.0 || feeds.empty()) return;
        const auto& fabric = out_.population.fabric;
        auto& agents = out_.population.agents;

        std::vector<std::set<ContentId>> wanted(base_communities_);
        for (const auto& f : feeds) {
            for (const auto& [c, _] : fabric.citizen(f.citizen).memberships) {
                if (c.index() >= base_communities_) continue;
                for (const auto& e : f.entries) wanted[c.index()].insert(e.content);
            }
        }
        std::vector<std::map<ContentId, double>> common(base_communities_);
        parallel_for(base_communities_, [&](std::size_t i) {
            const CommunityId c(static_cast<std::uint32_t>(i));
            const Community& community = fabric.community(c);
            if (community.members.empty()) return;
            std::vector<MemberBelief> members;
            for (ContentId m : wanted[i]) {
                members.clear();
                for (CitizenId p : community.members) {
                    members.push_back({p, agents[p.index()].belief(m), fabric.standing(p, c)});
                }
                common[i][m] = aggregate_belief(members, community.principal_subcommunities);
            }
        });
        for (const auto& f : feeds) {
            AgentState& agent = agents[f.citizen.index()];
            for (const auto& e : f.entries) {
                double num = 0.0;
                double den = 0.0;
                for (const auto& [c, _] : fabric.citizen(f.citizen).memberships) {
                    if (c.index() >= base_communities_) continue;
                    const double d = fabric.devotion(f.citizen, c);
                    num += d * common[c.index()].at(e.content);
                    den += d;
                }
                if (den <= 0.0) continue;
                double& a = agent.attitudes.at(e.content);
                a = (1.0 - gamma) * a + gamma * num / den;
            }
        }
    }

    double common_belief(CommunityId c, ContentId m) const {
        const auto& fabric = out_.population.fabric;
        std::vector<MemberBelief> members;
        for (CitizenId p : fabric.community(c).members) {
            members.push_back({p, out_.population.agents[p.index()].belief(m), fabric.standing(p, c)});
        }
        return aggregate_belief(members, out_.population.planted_blocs[c.index()]);
    }

    RoundMetrics metrics(int t, double revenue) const {
        const auto& fabric = out_.population.fabric;
        RoundMetrics rm;
        rm.round = t;
        rm.platform_revenue = revenue;

        double belief_sum = 0.0;
        double gap_sum = 0.0;
        int scored = 0;
        for (std::size_t i = 0; i < base_communities_; ++i) {
            const CommunityId c(static_cast<std::uint32_t>(i));
            if (fabric.community(c).members.empty()) continue;
            const auto& planted = out_.population.planted_blocs[i];
            const auto top = top_exposed_contents(community_exposure_[i], static_cast<std::size_t>(cfg_.sim.top_exposed));
            if (!top.empty()) {
                double b = 0.0;
                double gap = 0.0;
                for (ContentId m : top) {
                    b += common_belief(c, m);
                    const ContentItem& item = out_.catalog.get(m);
                    double lo = 1.0;
                    double hi = 0.0;
                    for (const auto& bloc : planted) {
                        if (bloc.empty()) continue;
                        double sum = 0.0;
                        for (CitizenId p : bloc) sum += current_attitude(out_.population.agents[p.index()], item);
                        const double mean = sum / static_cast<double>(bloc.size());
                        lo = std::min(lo, mean);
                        hi = std::max(hi, mean);
                    }
                    gap += hi >= lo ? hi - lo : 0.0;
                }
                belief_sum += b / static_cast<double>(top.size());
                gap_sum += gap / static_cast<double>(top.size());
                ++scored;
            }

            auto cards = out_.board.cards_for(Scope::of(c));
            std::sort(cards.begin(), cards.end(), [](const ScoreCard& a, const ScoreCard& b) {
                if (a.psi != b.psi) return a.psi > b.psi;
                return a.content < b.content;
            });
            const std::size_t n = std::min(cards.size(), static_cast<std::size_t>(cfg_.sim.coherence_top));
            double coherence = 0.0;
            for (std::size_t j = 0; j < n; ++j) coherence += common_belief(c, cards[j].content);
            rm.coherence[c] = n > 0 ? coherence / static_cast<double>(n) : 0.0;
        }
        if (scored > 0) {
            rm.common_belief_top_exposed = belief_sum / scored;
            rm.polarization_index = gap_sum / scored;
        }

        std::vector<double> totals;
        totals.reserve(out_.catalog.size());
        for (const auto& item : out_.catalog.items()) {
            auto it = content_exposure_.find(item.id);
            totals.push_back(it == content_exposure_.end() ? 0.0 : it->second);
        }
        rm.attention_gini = gini(totals);
        return rm;
    }

    const ScenarioConfig& cfg_;
    RunResult out_;
    SeedingAllowances allowances_;
    std::size_t base_communities_ = 0;
    std::map<ContentId, double> content_exposure_;                 // unclamped, all viewers
    std::vector<std::map<ContentId, double>> community_exposure_;  // unclamped, per community
};

}  // namespace

RunResult run(const ScenarioConfig& config) {
    Simulation sim(config);
    for (int t = 0; t < config.sim.rounds; ++t) sim.round(t);
    return sim.finish();
}

}  // namespace plural
