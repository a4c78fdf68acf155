#include "plural/score.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "plural/error.hpp"
#include "plural/numeric.hpp"

namespace plural {

std::string_view to_string(Scope::Kind kind) { return kind == Scope::Kind::Community ? "community" : "citizen"; }

std::string_view to_string(Label label) {
    switch (label) {
        case Label::Bridging: return "Bridging";
        case Label::Divisive: return "Divisive";
        case Label::Neither: break;
    }
    return "Neither";
}

std::string_view to_string(BridgingBackend backend) {
    switch (backend) {
        case BridgingBackend::GacUniform: return "gac_uniform";
        case BridgingBackend::GacPenrose: return "gac_penrose";
        case BridgingBackend::Mf: return "mf";
    }
    return "gac_penrose";
}

std::optional<BridgingBackend> parse_backend(std::string_view name) {
    if (name == "gac_uniform") return BridgingBackend::GacUniform;
    if (name == "gac_penrose") return BridgingBackend::GacPenrose;
    if (name == "mf") return BridgingBackend::Mf;
    return std::nullopt;
}

std::string_view to_string(Scorer scorer) { return scorer == Scorer::Bridging ? "bridging" : "engagement"; }

std::optional<Scorer> parse_scorer(std::string_view name) {
    if (name == "bridging") return Scorer::Bridging;
    if (name == "engagement") return Scorer::Engagement;
    return std::nullopt;
}

namespace {

double smoothed_rate(int pos, int neg, double alpha) {
    const double den = pos + neg + 2.0 * alpha;
    if (den <= 0.0) return 0.5;
    return (pos + alpha) / den;
}

}  // namespace

BlocRates bloc_approval_rates(const ReactionMatrix& reactions, ContentId content, std::span<const MemberSet> blocs,
                              double alpha) {
    require(alpha >= 0.0, ErrorCode::InvalidArgument, "smoothing alpha must be >= 0");
    const auto& row = reactions.for_content(content);
    BlocRates out;
    out.rates.reserve(blocs.size());
    out.sizes.reserve(blocs.size());
    for (const auto& bloc : blocs) {
        int pos = 0;
        int neg = 0;
        for (CitizenId m : bloc) {
            auto it = row.find(m);
            if (it == row.end()) continue;
            if (it->second.reaction > 0) ++pos;
            else if (it->second.reaction < 0) ++neg;
        }
        out.rates.push_back(smoothed_rate(pos, neg, alpha));
        out.sizes.push_back(static_cast<double>(bloc.size()));
    }
    return out;
}

double pooled_approval_rate(const ReactionMatrix& reactions, ContentId content, std::span<const CitizenId> members,
                            double alpha) {
    const auto& row = reactions.for_content(content);
    int pos = 0;
    int neg = 0;
    for (const auto& [citizen, rec] : row) {
        if (rec.reaction == 0 || !std::binary_search(members.begin(), members.end(), citizen)) continue;
        if (rec.reaction > 0) ++pos;
        else ++neg;
    }
    return smoothed_rate(pos, neg, alpha);
}

double interest(const ReactionMatrix& reactions, ContentId content, std::span<const CitizenId> members,
                int current_round, double half_life) {
    require(half_life > 0.0, ErrorCode::InvalidArgument, "half_life must be positive");
    if (members.empty()) return 0.0;
    const auto& row = reactions.for_content(content);
    double total = 0.0;
    for (const auto& [citizen, rec] : row) {
        if (!rec.exposed || !std::binary_search(members.begin(), members.end(), citizen)) continue;
        const double age = std::max(0, current_round - rec.round);
        total += std::exp2(-age / half_life) * (1.0 + 0.5 * std::abs(rec.reaction));
    }
    return total / static_cast<double>(members.size());
}

double bridging_gac(const BlocRates& rates, BlocWeighting weighting) {
    if (rates.rates.size() < 2) {
        fail(ErrorCode::FewerThanTwoBlocs, fmt::format("bridging needs >= 2 blocs, got {}", rates.rates.size()));
    }
    std::vector<double> weights = weighting == BlocWeighting::Penrose
                                      ? sqrt_size_weights(rates.sizes)
                                      : std::vector<double>(rates.rates.size(), 1.0 / static_cast<double>(rates.rates.size()));
    return weighted_geometric_mean(rates.rates, weights);
}

Divisiveness divisiveness(const BlocRates& rates) {
    const auto& r = rates.rates;
    if (r.size() < 2) fail(ErrorCode::FewerThanTwoBlocs, fmt::format("divisiveness needs >= 2 blocs, got {}", r.size()));
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    Divisiveness out;
    out.delta = *hi - *lo;
    for (std::size_t g = 0; g < r.size(); ++g) {
        if (r[g] >= 0.5) out.characteristic_blocs.push_back(static_cast<int>(g));
    }
    out.strict_subset = !out.characteristic_blocs.empty() && out.characteristic_blocs.size() < r.size();
    return out;
}

double community_score(double iota, double beta, double delta) { return iota * std::max(beta, delta); }

void assign_label(ScoreCard& card, const Divisiveness& div, double label_floor) {
    card.characteristic_blocs.clear();
    if (card.delta > card.beta && card.delta >= label_floor && div.strict_subset) {
        card.label = Label::Divisive;
        card.characteristic_blocs = div.characteristic_blocs;
    } else if (card.beta >= card.delta && card.beta >= label_floor) {
        card.label = Label::Bridging;
    } else {
        card.label = Label::Neither;
    }
}

namespace {

BlocWeighting weighting_for(BridgingBackend backend) {
    return backend == BridgingBackend::GacUniform ? BlocWeighting::Uniform : BlocWeighting::Penrose;
}

// β/δ for one content over the given blocs; `mf_beta` replaces the GAC value
// when the MF backend produced one. Non-strict-subset divisiveness counts as 0.
void fill_bridging(ScoreCard& card, const ReactionMatrix& reactions, std::span<const MemberSet> blocs,
                   std::span<const CitizenId> pooled_members, const ScoreParams& params, std::optional<double> mf_beta) {
    if (blocs.size() < 2) {
        card.beta = pooled_approval_rate(reactions, card.content, pooled_members, params.alpha);
        card.delta = 0.0;
        card.low_confidence = true;
        assign_label(card, Divisiveness{}, params.label_floor);
        return;
    }
    const BlocRates rates = bloc_approval_rates(reactions, card.content, blocs, params.alpha);
    const Divisiveness div = divisiveness(rates);
    card.beta = mf_beta ? *mf_beta : bridging_gac(rates, weighting_for(params.backend));
    card.delta = div.strict_subset ? div.delta : 0.0;
    assign_label(card, div, params.label_floor);
}

void finish_card(ScoreCard& card, const ScoreParams& params) {
    if (params.scorer == Scorer::Engagement) {
        card.beta = 1.0;
        card.delta = 0.0;
        card.psi = card.iota;
        card.label = Label::Neither;
        card.characteristic_blocs.clear();
        return;
    }
    card.psi = community_score(card.iota, card.beta, card.delta);
}

}  // namespace

std::vector<ScoreCard> score_community(const SocialFabric& fabric, CommunityId community,
                                       const ReactionMatrix& reactions, std::span<const ContentId> contents,
                                       const ScoreParams& params, int current_round) {
    const Community& g = fabric.community(community);
    const auto& blocs = g.principal_subcommunities;

    std::optional<MfFit> fit;
    if (params.scorer == Scorer::Bridging && params.backend == BridgingBackend::Mf && blocs.size() >= 2) {
        try {
            MfParams mf = params.mf;
            mf.seed = params.mf.seed ^ (0x5bd1e995ULL * (community.value + 1));
            fit = bridging_mf(reactions, g.members, mf, contents);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientData) throw;
        }
    }

    std::vector<ScoreCard> cards;
    cards.reserve(contents.size());
    for (ContentId m : contents) {
        ScoreCard card;
        card.content = m;
        card.scope = Scope::of(community);
        card.iota = interest(reactions, m, g.members, current_round, params.half_life);
        if (params.scorer == Scorer::Bridging) {
            std::optional<double> mf_beta;
            if (fit) {
                auto it = fit->beta_raw.find(m);
                mf_beta = it != fit->beta_raw.end() ? it->second : 0.5;
            }
            fill_bridging(card, reactions, blocs, g.members, params, mf_beta);
        }
        finish_card(card, params);
        cards.push_back(std::move(card));
    }
    return cards;
}

ScoreCard citizen_score(ContentId content, CitizenId citizen, const SocialFabric& fabric,
                        const ReactionMatrix& reactions, const ScoreParams& params, int current_round) {
    const Citizen& p = fabric.citizen(citizen);
    ScoreCard card;
    card.content = content;
    card.scope = Scope::of(citizen);
    const CitizenId self[] = {citizen};
    card.iota = interest(reactions, content, self, current_round, params.half_life);
    if (params.scorer == Scorer::Bridging) {
        std::vector<MemberSet> blocs;
        MemberSet pooled;
        for (const auto& [g, _] : p.memberships) {
            const auto& members = fabric.community(g).members;
            blocs.push_back(members);
            pooled.insert(pooled.end(), members.begin(), members.end());
        }
        std::sort(pooled.begin(), pooled.end());
        pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
        ScoreParams gac = params;
        if (gac.backend == BridgingBackend::Mf) gac.backend = BridgingBackend::GacPenrose;
        fill_bridging(card, reactions, blocs, pooled, gac, std::nullopt);
    }
    finish_card(card, params);
    return card;
}

std::vector<ContentId> balancing_set(const ScoreCard& divisive, std::span<const ScoreCard> cards,
                                     const ContentCatalog& catalog, bool require_topic_overlap, double delta_tol) {
    require(divisive.label == Label::Divisive, ErrorCode::InvalidArgument,
            fmt::format("content {} is not divisive in this scope", divisive.content.value));
    require(delta_tol >= 0.0, ErrorCode::InvalidArgument, "delta_tol must be >= 0");
    const auto& own = divisive.characteristic_blocs;
    std::vector<const ScoreCard*> picked;
    for (const auto& c : cards) {
        if (c.content == divisive.content || c.scope != divisive.scope || c.label != Label::Divisive) continue;
        if (std::abs(c.delta - divisive.delta) > delta_tol) continue;
        const bool disjoint = std::none_of(c.characteristic_blocs.begin(), c.characteristic_blocs.end(),
                                           [&](int g) { return std::find(own.begin(), own.end(), g) != own.end(); });
        if (!disjoint) continue;
        if (require_topic_overlap && !catalog.get(c.content).shares_topic(catalog.get(divisive.content))) continue;
        picked.push_back(&c);
    }
    std::sort(picked.begin(), picked.end(), [](const ScoreCard* a, const ScoreCard* b) {
        if (a->psi != b->psi) return a->psi > b->psi;
        return a->content < b->content;
    });
    std::vector<ContentId> out;
    out.reserve(picked.size());
    for (const auto* c : picked) out.push_back(c->content);
    return out;
}

void ScoreBoard::put(ScoreCard card) {
    const auto key = std::make_pair(card.scope, card.content);
    cards_.insert_or_assign(key, std::move(card));
}

const ScoreCard* ScoreBoard::find(ContentId content, Scope scope) const {
    auto it = cards_.find({scope, content});
    return it == cards_.end() ? nullptr : &it->second;
}

double ScoreBoard::psi(ContentId content, Scope scope, int round) const {
    if (scope.kind == Scope::Kind::Community) {
        if (auto o = active_override(content, CommunityId(scope.id), round)) return *o;
    }
    const ScoreCard* card = find(content, scope);
    return card ? card->psi : 0.0;
}

void ScoreBoard::set_override(ContentId content, CommunityId community, double psi, int from_round, int until_round) {
    overrides_[{community, content}] = Override{psi, from_round, until_round};
}

std::optional<double> ScoreBoard::active_override(ContentId content, CommunityId community, int round) const {
    auto it = overrides_.find({community, content});
    if (it == overrides_.end()) return std::nullopt;
    if (round < it->second.from_round || round >= it->second.until_round) return std::nullopt;
    return it->second.psi;
}

void ScoreBoard::expire_overrides(int round) {
    std::erase_if(overrides_, [round](const auto& kv) { return kv.second.until_round <= round; });
}

void ScoreBoard::set_balancing(ContentId content, Scope scope, std::vector<ContentId> counterparts) {
    balancing_[{scope, content}] = std::move(counterparts);
}

const std::vector<ContentId>& ScoreBoard::balancing(ContentId content, Scope scope) const {
    static const std::vector<ContentId> empty;
    auto it = balancing_.find({scope, content});
    return it == balancing_.end() ? empty : it->second;
}

void ScoreBoard::clear_cards() {
    cards_.clear();
    balancing_.clear();
}

std::vector<ScoreCard> ScoreBoard::cards_for(Scope scope) const {
    std::vector<ScoreCard> out;
    for (auto it = cards_.lower_bound({scope, ContentId(0)}); it != cards_.end() && it->first.first == scope; ++it) {
        out.push_back(it->second);
    }
    return out;
}

}  // namespace plural
