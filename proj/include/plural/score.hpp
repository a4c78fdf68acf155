#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "plural/content.hpp"
#include "plural/fabric.hpp"
#include "plural/ids.hpp"

namespace plural {

/// Whose perspective a score is computed from.
struct Scope {
    enum class Kind : std::uint8_t { Community, Citizen };

    Kind kind = Kind::Community;
    std::uint32_t id = 0;

    static Scope of(CommunityId c) { return {Kind::Community, c.value}; }
    static Scope of(CitizenId c) { return {Kind::Citizen, c.value}; }

    friend auto operator<=>(const Scope&, const Scope&) = default;
};

std::string_view to_string(Scope::Kind kind);

enum class Label : std::uint8_t { Neither, Bridging, Divisive };
std::string_view to_string(Label label);

enum class BridgingBackend : std::uint8_t { GacUniform, GacPenrose, Mf };
std::string_view to_string(BridgingBackend backend);
std::optional<BridgingBackend> parse_backend(std::string_view name);
inline constexpr std::string_view kBackendNames = "gac_uniform, gac_penrose, mf";

/// Bridging ranks by ι·max(β,δ); Engagement is the popularity-only baseline ψ = ι.
enum class Scorer : std::uint8_t { Bridging, Engagement };
std::string_view to_string(Scorer scorer);
std::optional<Scorer> parse_scorer(std::string_view name);

enum class BlocWeighting : std::uint8_t { Uniform, Penrose };

struct MfParams {
    double reg = 0.03;
    int epochs = 300;
    double lr = 0.05;
    double lr_decay = 0.02;  // lr_epoch = lr / (1 + lr_decay · epoch)
    std::uint64_t seed = 0;

    bool operator==(const MfParams&) const = default;
};

struct ScoreParams {
    Scorer scorer = Scorer::Bridging;
    BridgingBackend backend = BridgingBackend::GacPenrose;
    double alpha = 1.0;  // Laplace smoothing on bloc approval rates
    double label_floor = 0.1;
    double half_life = 5.0;  // rounds
    MfParams mf;

    bool operator==(const ScoreParams&) const = default;
};

struct ScoreCard {
    ContentId content;
    Scope scope;
    double iota = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double psi = 0.0;
    std::vector<int> characteristic_blocs;  // only populated for Divisive
    Label label = Label::Neither;
    bool low_confidence = false;  // β fell back to a pooled approval rate
};

/// Per-bloc smoothed approval rates (pos + α) / (pos + neg + 2α); a bloc with no
/// explicit reactions gets 0.5. sizes[g] is the bloc's member count.
struct BlocRates {
    std::vector<double> rates;
    std::vector<double> sizes;
};

BlocRates bloc_approval_rates(const ReactionMatrix& reactions, ContentId content, std::span<const MemberSet> blocs,
                              double alpha);

/// Pooled smoothed approval over the union of `members`.
double pooled_approval_rate(const ReactionMatrix& reactions, ContentId content, std::span<const CitizenId> members,
                            double alpha);

/// Time-decayed interest: Σ 2^(−age/half_life)(1 + ½|reaction|) over exposed
/// members, divided by the member count. `members` must be sorted.
double interest(const ReactionMatrix& reactions, ContentId content, std::span<const CitizenId> members,
                int current_round, double half_life);

/// Group-aware consensus as a weighted geometric mean of bloc approval rates.
/// Throws FewerThanTwoBlocs.
double bridging_gac(const BlocRates& rates, BlocWeighting weighting);

struct Divisiveness {
    double delta = 0.0;
    std::vector<int> characteristic_blocs;  // blocs with rate ≥ 0.5
    bool strict_subset = false;             // characteristic set is neither empty nor all blocs
};

/// δ = max rate − min rate. Throws FewerThanTwoBlocs.
Divisiveness divisiveness(const BlocRates& rates);

/// ψ = ι · max(β, δ).
double community_score(double iota, double beta, double delta);

/// Fitted one-dimensional factor model r̂ = μ + b_u + b_i + f_u f_i over explicit
/// reactions (+1 → 1, −1 → 0), minimizing
///   Σ_obs ½[(r − r̂)² + reg (b_u² + b_i² + f_u² + f_i²)]
/// by seeded SGD. beta_raw = clamp(μ + b_i, 0, 1).
struct MfFit {
    double mu = 0.0;
    std::map<ContentId, double> beta_raw;
    std::map<ContentId, double> item_bias;
    std::map<ContentId, double> item_factor;
    std::map<CitizenId, double> rater_bias;
    std::map<CitizenId, double> rater_factor;
    double loss = 0.0;
};

/// Fits over reactions by `raters` to contents in `contents` (all contents when
/// empty). Throws InsufficientData with fewer than two raters or two items.
MfFit bridging_mf(const ReactionMatrix& reactions, std::span<const CitizenId> raters, const MfParams& params,
                  std::span<const ContentId> contents = {});

/// Evaluates the factor-model objective for a given parameter set; shared by the
/// fitter's diagnostics.
double mf_objective(const ReactionMatrix& reactions, const MfFit& fit, double reg);

/// Fills label and characteristic blocs from β, δ and the divisiveness result.
void assign_label(ScoreCard& card, const Divisiveness& div, double label_floor);

/// Scores every content in `contents` for one community using its principal
/// subcommunities as blocs.
std::vector<ScoreCard> score_community(const SocialFabric& fabric, CommunityId community,
                                       const ReactionMatrix& reactions, std::span<const ContentId> contents,
                                       const ScoreParams& params, int current_round);

/// Citizen-scope card: the citizen's communities act as blocs and interest is
/// measured over the singleton scope.
ScoreCard citizen_score(ContentId content, CitizenId citizen, const SocialFabric& fabric,
                        const ReactionMatrix& reactions, const ScoreParams& params, int current_round);

/// Balancing counterparts κ of a Divisive card among `cards` of the same scope,
/// sorted by ψ descending then content id.
std::vector<ContentId> balancing_set(const ScoreCard& divisive, std::span<const ScoreCard> cards,
                                     const ContentCatalog& catalog, bool require_topic_overlap, double delta_tol);

/// Score cards of one round plus active seeding overrides and balancing sets.
class ScoreBoard {
public:
    void put(ScoreCard card);
    const ScoreCard* find(ContentId content, Scope scope) const;

    /// Effective ψ: an active seeding override for community scopes, else the
    /// card's ψ, else 0.
    double psi(ContentId content, Scope scope, int round) const;

    /// Override active for rounds [from_round, until_round).
    void set_override(ContentId content, CommunityId community, double psi, int from_round, int until_round);
    std::optional<double> active_override(ContentId content, CommunityId community, int round) const;
    void expire_overrides(int round);

    void set_balancing(ContentId content, Scope scope, std::vector<ContentId> counterparts);
    const std::vector<ContentId>& balancing(ContentId content, Scope scope) const;

    /// Drops cards and balancing sets; overrides survive.
    void clear_cards();

    const std::map<std::pair<Scope, ContentId>, ScoreCard>& cards() const { return cards_; }
    std::vector<ScoreCard> cards_for(Scope scope) const;

private:
    struct Override {
        double psi = 0.0;
        int from_round = 0;
        int until_round = 0;
    };
    std::map<std::pair<Scope, ContentId>, ScoreCard> cards_;
    std::map<std::pair<CommunityId, ContentId>, Override> overrides_;
    std::map<std::pair<Scope, ContentId>, std::vector<ContentId>> balancing_;
};

}  // namespace plural
