// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "plural/cli.hpp"
#include "plural/config.hpp"
#include "plural/detect.hpp"
#include "plural/error.hpp"
#include "plural/rank.hpp"
#include "plural/score.hpp"
#include "plural/sim.hpp"

using namespace plural;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds.
constexpr double kExposureTol = 1e-12;
constexpr double kShareSumTol = 1e-9;
constexpr double kSchurTol = 1e-12;
constexpr double kMfOracleTol = 0.05;
constexpr int kMfMinTopSeeds = 95;
constexpr double kJaccardMin = 0.9;
constexpr int kRecoveryMinSeeds = 95;
constexpr double kLedgerTol = 1e-9;
constexpr double kSimplexTol = 1e-9;
constexpr int kDemoMinWins = 8;

struct Outcome {
    bool pass = false;
    std::string detail;
};

fs::path scenario(const char* name) { return fs::path(PLURAL_SOURCE_DIR) / "scenarios" / name; }

// ---------------------------------------------------------------------------

Outcome exposure_equation() {
    Rng rng(2024);
    double worst = 0.0;
    double worst_sum = 0.0;
    int citizens_checked = 0;
    for (int instance = 0; instance < 100; ++instance) {
        const int citizens = 1 + static_cast<int>(rng.below(10));
        const int communities = 1 + static_cast<int>(rng.below(3));
        const int contents = 1 + static_cast<int>(rng.below(12));

        SocialFabric fabric;
        ScoreBoard board;
        std::vector<double> community_lambda(communities);
        std::vector<std::vector<double>> community_psi(communities, std::vector<double>(contents));
        for (int c = 0; c < communities; ++c) {
            community_lambda[c] = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, 2.0);
            const CommunityId id = fabric.add_community(community_lambda[c]);
            for (int m = 0; m < contents; ++m) {
                community_psi[c][m] = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 2.0);
                ScoreCard card;
                card.content = ContentId(static_cast<std::uint32_t>(m));
                card.scope = Scope::of(id);
                card.psi = community_psi[c][m];
                board.put(card);
            }
        }
        std::vector<oracle::ExposureCase> cases;
        for (int p = 0; p < citizens; ++p) {
            oracle::ExposureCase x;
            x.citizen_lambda = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 3.0);
            x.community_lambda = community_lambda;
            x.community_psi = community_psi;
            const CitizenId id = fabric.add_citizen(x.citizen_lambda);
            for (int m = 0; m < contents; ++m) {
                x.citizen_psi.push_back(rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 2.0));
                ScoreCard card;
                card.content = ContentId(static_cast<std::uint32_t>(m));
                card.scope = Scope::of(id);
                card.psi = x.citizen_psi.back();
                board.put(card);
            }
            bool member = false;
            for (int c = 0; c < communities; ++c) {
                const bool in = rng.uniform() < 0.6 || (c == communities - 1 && !member);
                member = member || in;
                x.raw_devotion.push_back(in ? rng.uniform(0.05, 4.0) : 0.0);
                if (in) fabric.add_membership(id, CommunityId(static_cast<std::uint32_t>(c)), 1.0, x.raw_devotion.back());
            }
            cases.push_back(x);
        }
        std::vector<ContentId> pool;
        for (int m = 0; m < contents; ++m) pool.emplace_back(static_cast<std::uint32_t>(m));
        for (int p = 0; p < citizens; ++p) {
            const auto got = exposure_weights(CitizenId(static_cast<std::uint32_t>(p)), fabric, board, pool, 0);
            const auto want = oracle::exposure_shares(cases[p]);
            double sum = 0.0;
            for (int m = 0; m < contents; ++m) {
                worst = std::max(worst, std::abs(got.entries[m].weight - want[m]));
                sum += got.entries[m].weight;
            }
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
            ++citizens_checked;
        }
    }
    return {worst <= kExposureTol && worst_sum <= kShareSumTol,
            fmt::format("100 instances, {} citizens; max |e - oracle| = {:.3g}, max |sum - 1| = {:.3g}", citizens_checked,
                        worst, worst_sum)};
}

Outcome psi_formula() {
    Rng rng(7);
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const double iota = rng.uniform() < 0.05 ? 0.0 : rng.uniform(0.0, 5.0);
        const double beta = rng.uniform();
        const double delta = rng.uniform() < 0.1 ? beta : rng.uniform();
        const double want = iota * (beta >= delta ? beta : delta);
        if (community_score(iota, beta, delta) != want) ++mismatches;
    }
    return {mismatches == 0, fmt::format("10000 cases, {} mismatches", mismatches)};
}

double aggregate_of_means(const std::vector<double>& means, int per_bloc, const std::vector<double>& standings) {
    std::vector<MemberBelief> members;
    std::vector<MemberSet> blocs;
    std::uint32_t next = 0;
    for (double m : means) {
        MemberSet bloc;
        for (int i = 0; i < per_bloc; ++i) {
            members.push_back({CitizenId(next), m, standings[next]});
            bloc.emplace_back(next++);
        }
        blocs.push_back(bloc);
    }
    return aggregate_belief(members, blocs);
}

Outcome schur_concavity() {
    Rng rng(99);
    int violations = 0;
    double worst = -1.0;
    for (int pair = 0; pair < 1000; ++pair) {
        const int g = 2 + static_cast<int>(rng.below(6));
        const int per = 1 + static_cast<int>(rng.below(4));
        std::vector<double> standings(static_cast<std::size_t>(g * per));
        for (double& s : standings) s = rng.uniform(0.1, 3.0);
        std::vector<double> y(g);
        for (double& v : y) v = rng.uniform(0.02, 0.98);
        // A chain of spreading transfers keeps the mean and makes x majorize y.
        std::vector<double> x = y;
        const int steps = 1 + static_cast<int>(rng.below(3));
        for (int s = 0; s < steps; ++s) {
            const auto i = rng.below(g);
            auto j = rng.below(g - 1);
            if (j >= i) ++j;
            const auto lo = x[i] <= x[j] ? i : j;
            const auto hi = lo == i ? j : i;
            const double t = rng.uniform(0.0, std::max(0.0, std::min(x[lo] - 0.01, 0.99 - x[hi])));
            x[lo] -= t;
            x[hi] += t;
        }
        // Within-bloc means do not depend on standings when members agree.
        const double bx = aggregate_of_means(x, per, standings);
        const double by = aggregate_of_means(y, per, standings);
        worst = std::max(worst, bx - by);
        if (bx > by + kSchurTol) ++violations;
    }
    int consensus_misses = 0;
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform();
        const int g = 1 + static_cast<int>(rng.below(6));
        const int per = 1 + static_cast<int>(rng.below(4));
        std::vector<double> standings(static_cast<std::size_t>(g * per));
        for (double& s : standings) s = rng.uniform(0.1, 3.0);
        if (aggregate_of_means(std::vector<double>(g, v), per, standings) != v) ++consensus_misses;
    }
    return {violations == 0 && consensus_misses == 0,
            fmt::format("1000 majorization pairs, {} violations (max b(x) - b(y) = {:.3g}); 1000 consensus cases, {} "
                        "inexact",
                        violations, worst, consensus_misses)};
}

Outcome consensus_grid() {
    // Two blocs, α = 0, rates on a 0.1 grid realised as reaction counts out of 10.
    int violations = 0;
    int rejected_cases = 0;
    double best_rejected = 0.0;
    const std::vector<std::pair<int, int>> sizes{{10, 10}, {10, 40}, {40, 10}};
    for (const auto& [na, nb] : sizes) {
        auto score = [&, na = na, nb = nb](int pa, int pb, BlocWeighting w) {
            ReactionMatrix r;
            MemberSet a, b;
            for (int i = 0; i < na; ++i) a.emplace_back(static_cast<std::uint32_t>(i));
            for (int i = 0; i < nb; ++i) b.emplace_back(static_cast<std::uint32_t>(na + i));
            // pa of 10 reactors in bloc a approve, the rest of the 10 reject.
            for (int i = 0; i < 10; ++i) r.record_reaction(a[i], ContentId(0), i < pa ? 1 : -1, 0);
            for (int i = 0; i < 10; ++i) r.record_reaction(b[i], ContentId(0), i < pb ? 1 : -1, 0);
            const MemberSet blocs[] = {a, b};
            return bridging_gac(bloc_approval_rates(r, ContentId(0), blocs, 0.0), w);
        };
        for (BlocWeighting w : {BlocWeighting::Uniform, BlocWeighting::Penrose}) {
            const double unanimous = score(10, 10, w);
            for (int pa = 0; pa <= 10; ++pa) {
                for (int pb = 0; pb <= 10; ++pb) {
                    if (std::min(pa, pb) >= 5) continue;  // rejected = a bloc's majority disapproves
                    ++rejected_cases;
                    const double beta = score(pa, pb, w);
                    best_rejected = std::max(best_rejected, beta);
                    if (!(unanimous > beta)) ++violations;
                }
            }
        }
    }
    return {violations == 0, fmt::format("{} rejected grid points, {} not strictly below unanimous (max rejected beta "
                                         "= {:.4f})",
                                         rejected_cases, violations, best_rejected)};
}

Outcome factor_model() {
    int top = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto x = oracle::planted_bridging_instance(seed);
        ReactionMatrix r;
        std::vector<CitizenId> raters;
        for (int u = 0; u < x.raters; ++u) {
            raters.emplace_back(static_cast<std::uint32_t>(u));
            for (int i = 0; i < x.items; ++i) {
                r.record_reaction(raters.back(), ContentId(static_cast<std::uint32_t>(i)), x.ratings[u][i] > 0.5 ? 1 : -1, 0);
            }
        }
        MfParams params;
        params.seed = seed;
        const auto fit = bridging_mf(r, raters, params);
        const auto want = oracle::mf_intercepts(x, params.reg, seed);
        ContentId best(0);
        for (const auto& [m, b] : fit.beta_raw) {
            if (b > fit.beta_raw.at(best)) best = m;
            worst = std::max(worst, std::abs(b - want[m.index()]));
        }
        top += best == ContentId(0);
    }
    return {top >= kMfMinTopSeeds && worst <= kMfOracleTol,
            fmt::format("bridging item on top in {}/100 seeds; max |beta - oracle| = {:.4f}", top, worst)};
}

Outcome community_recovery() {
    int recovered = 0;
    int monotone_failures = 0;
    int fits = 0;
    const double sigma = 0.12;
    const std::vector<std::vector<double>> centers{{-0.6, 0.6, 0.0}, {0.6, 0.6, 0.0}, {0.0, -0.6, 0.6}};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(derive_seed(seed, {77}));
        AttitudeMatrix data;
        const int per = 25;
        data.values.resize(per * 3, 3);
        for (int c = 0; c < 3; ++c) {
            for (int i = 0; i < per; ++i) {
                const int row = c * per + i;
                data.rows.emplace_back(static_cast<std::uint32_t>(row));
                for (int j = 0; j < 3; ++j) data.values(row, j) = std::clamp(centers[c][j] + rng.normal(0.0, sigma), -1.0, 1.0);
            }
        }
        data.cols = {0, 1, 2};
        DetectOptions opts;
        opts.seed = seed;
        const auto found = detect_communities(data, opts);
        bool ok = true;
        for (int c = 0; c < 3; ++c) {
            MemberSet planted;
            for (int i = 0; i < per; ++i) planted.emplace_back(static_cast<std::uint32_t>(c * per + i));
            double best = 0.0;
            for (const auto& cand : found) {
                MemberSet inter;
                std::set_intersection(cand.members.begin(), cand.members.end(), planted.begin(), planted.end(),
                                      std::back_inserter(inter));
                best = std::max(best, static_cast<double>(inter.size()) /
                                          static_cast<double>(cand.members.size() + planted.size() - inter.size()));
            }
            ok = ok && best >= kJaccardMin;
        }
        recovered += ok;
        for (int k = opts.k_min; k <= opts.k_max; ++k) {
            const auto fit = fuzzy_c_means(data, {.k = k, .seed = seed});
            ++fits;
            for (std::size_t t = 1; t < fit.objective_history.size(); ++t) {
                if (fit.objective_history[t] > fit.objective_history[t - 1] * (1.0 + 1e-12)) {
                    ++monotone_failures;
                    break;
                }
            }
        }
    }
    return {recovered >= kRecoveryMinSeeds && monotone_failures == 0,
            fmt::format("recovered in {}/100 seeds (centers {:.1f} sigma apart); objective rose in {}/{} fits", recovered,
                        0.6 * std::sqrt(2.0) / sigma, monotone_failures, fits)};
}

// Ledger checks shared by every simulation run in this binary.
struct LedgerTally {
    int runs = 0;
    int failures = 0;
    double worst_imbalance = 0.0;
    double lowest_balance = 0.0;

    void add(const RunResult& result) {
        ++runs;
        const auto audit = audit_ledger(result.ledger);
        worst_imbalance = std::max(worst_imbalance, audit.max_round_imbalance);
        lowest_balance = std::min(lowest_balance, audit.min_balance);
        for (const auto& [_, b] : result.ledger.balances()) lowest_balance = std::min(lowest_balance, b);
        if (!audit.ok(kLedgerTol)) ++failures;
    }
};

LedgerTally g_ledgers;

Outcome ledger_conservation() {
    for (const char* name : {"minimal.json", "demo.json"}) g_ledgers.add(run(load_scenario(scenario(name))));
    const auto budget = run(load_scenario(scenario("budget_exhaustion.json")));
    g_ledgers.add(budget);
    const int clamps = static_cast<int>(std::count_if(budget.events.begin(), budget.events.end(), [](const auto& e) {
        return e.what == "insufficient funds; lambda clamped to 0";
    }));
    const bool ok = g_ledgers.failures == 0 && g_ledgers.lowest_balance >= -kLedgerTol && clamps > 0;
    return {ok, fmt::format("{} runs so far, {} audit failures, max imbalance {:.3g}, lowest balance {:.3g}; {} clamp "
                            "events in the budget scenario",
                            g_ledgers.runs, g_ledgers.failures, g_ledgers.worst_imbalance, g_ledgers.lowest_balance,
                            clamps)};
}

Outcome simplex_invariants() {
    Rng rng(31337);
    SocialFabric f;
    for (int i = 0; i < 40; ++i) f.add_citizen();
    for (int i = 0; i < 8; ++i) f.add_community();
    int applied = 0;
    for (int step = 0; step < 10000; ++step) {
        const CitizenId p(static_cast<std::uint32_t>(rng.below(f.citizen_count())));
        const CommunityId c(static_cast<std::uint32_t>(rng.below(f.community_count())));
        try {
            switch (rng.below(4)) {
                case 0:
                    if (!f.is_member(p, c)) f.add_membership(p, c, rng.uniform(0.01, 5.0), rng.uniform(0.01, 5.0));
                    break;
                case 1:
                    if (f.is_member(p, c)) f.update_devotion(p, c, rng.uniform(0.01, 5.0));
                    break;
                case 2:
                    if (f.is_member(p, c)) f.update_standing(p, c, rng.uniform(-2.0, 2.0));
                    break;
                default:
                    f.intersect_communities(CommunityId(static_cast<std::uint32_t>(rng.below(8))),
                                            CommunityId(static_cast<std::uint32_t>(rng.below(8))));
            }
            ++applied;
        } catch (const Error& e) {
            // Intersection communities refuse members outside both parents.
            if (e.code() != ErrorCode::InsufficientStanding && e.code() != ErrorCode::InvalidArgument) throw;
        }
    }
    double worst = 0.0;
    for (const auto& c : f.communities()) {
        if (c.members.empty()) continue;
        double s = 0.0;
        for (CitizenId m : c.members) s += f.standing(m, c.id);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    for (const auto& p : f.citizens()) {
        if (p.memberships.empty()) continue;
        double d = 0.0;
        for (const auto& [c, _] : p.memberships) d += f.devotion(p.id, c);
        worst = std::max(worst, std::abs(d - 1.0));
    }
    const auto problems = f.audit();
    return {worst <= kSimplexTol && problems.empty(),
            fmt::format("10000 mutations ({} applied, {} communities); max |sum - 1| = {:.3g}; {} audit problems", applied,
                        f.community_count(), worst, problems.size())};
}

Outcome demo_depolarization() {
    const auto base = load_scenario(scenario("demo.json"));
    int belief_wins = 0;
    int polarization_wins = 0;
    for (int s = 0; s < 10; ++s) {
        ScenarioConfig bridging = base;
        bridging.seed = base.seed + static_cast<std::uint64_t>(s);
        bridging.scoring.params.scorer = Scorer::Bridging;
        ScenarioConfig engagement = bridging;
        engagement.scoring.params.scorer = Scorer::Engagement;
        const auto a = run(bridging);
        const auto b = run(engagement);
        g_ledgers.add(a);
        g_ledgers.add(b);
        const auto& ma = a.metrics.back();
        const auto& mb = b.metrics.back();
        belief_wins += ma.common_belief_top_exposed > mb.common_belief_top_exposed;
        polarization_wins += ma.polarization_index < mb.polarization_index;
    }
    const bool ledgers_ok = g_ledgers.failures == 0;
    return {belief_wins >= kDemoMinWins && polarization_wins >= kDemoMinWins && ledgers_ok,
            fmt::format("higher common belief in {}/10 seeds, lower polarization in {}/10 seeds ({} ledgers audited, {} "
                        "failures)",
                        belief_wins, polarization_wins, g_ledgers.runs, g_ledgers.failures)};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "plural_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream err;
    auto run_with = [&](const char* threads, const char* dir) {
        setenv("PLURAL_THREADS", threads, 1);
        const int code = cli::cmd_run({scenario("demo.json"), root / dir, 5u, {}}, err);
        return code == cli::kExitOk ? slurp(root / dir / "metrics.csv") : std::string{};
    };
    const char* previous = std::getenv("PLURAL_THREADS");
    const std::string saved = previous ? previous : "";
    const auto first = run_with("1", "a");
    const auto second = run_with("1", "b");
    const auto threaded = run_with("4", "c");
    if (previous) setenv("PLURAL_THREADS", saved.c_str(), 1);
    else unsetenv("PLURAL_THREADS");
    const bool ok = !first.empty() && first == second && first == threaded;
    fs::remove_all(root);
    return {ok, fmt::format("metrics.csv {} bytes; repeat run {}, 4 threads vs 1 {}", first.size(),
                            first == second ? "identical" : "differs", first == threaded ? "identical" : "differs")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"exposure equation matches the brute-force oracle", exposure_equation},
        {"score equals interest times max(bridging, divisiveness)", psi_formula},
        {"common belief is Schur-concave and exact under consensus", schur_concavity},
        {"unanimous content outscores content a bloc rejects", consensus_grid},
        {"factor model surfaces the bridging item", factor_model},
        {"planted communities are recovered", community_recovery},
        {"ledgers conserve money and the clamp path triggers", ledger_conservation},
        {"standing and devotion stay on the simplex", simplex_invariants},
        {"bridging depolarizes the demo scenario", demo_depolarization},
        {"runs are byte-identical across repeats and thread counts", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, fmt::format("threw: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !out.pass;
        fmt::print("[{}] {:>2}. {}: {} ({:.1f}s)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail,
                   secs);
        std::fflush(stdout);
    }
    fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed;
}
