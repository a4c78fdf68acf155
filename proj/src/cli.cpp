#include "plural/cli.hpp"

#include <fmt/format.h>
#include <fstream>

#include "CLI11.hpp"

#include "plural/config.hpp"
#include "plural/error.hpp"
#include "plural/io.hpp"
#include "plural/sim.hpp"

namespace plural::cli {

namespace fs = std::filesystem;

namespace {

// Shared exit-code policy: configuration problems are 2, everything else 1.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

void check_ledger(const RunResult& result) {
    const LedgerAudit audit = audit_ledger(result.ledger);
    require(audit.ok(), ErrorCode::InvalidArgument,
            fmt::format("ledger audit failed: imbalance {}, min balance {}", audit.max_round_imbalance,
                        audit.min_balance));
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& err) {
    return guarded(err, [&] {
        ScenarioConfig config = load_scenario(options.scenario);
        if (options.seed) config.seed = *options.seed;
        if (options.rounds) {
            if (*options.rounds < 0) throw ConfigError("--rounds", "must be >= 0");
            config.sim.rounds = *options.rounds;
        }
        const RunResult result = run(config);
        check_ledger(result);
        write_run_outputs(options.out, result);
        return kExitOk;
    });
}

int cmd_score(const ScoreOptions& options, std::ostream& err) {
    return guarded(err, [&] {
        ScoreParams params;
        if (auto backend = parse_backend(options.backend)) params.backend = *backend;
        else throw ConfigError("--backend", fmt::format("unknown backend '{}' (valid: {})", options.backend, kBackendNames));
        const SocialFabric fabric = read_fabric_json(options.fabric);
        const ReactionMatrix reactions = read_reactions_csv(options.reactions);
        const int now = reactions.max_round();

        std::vector<ScoreCard> cards;
        for (const auto& community : fabric.communities()) {
            if (community.members.empty()) continue;
            std::vector<ContentId> contents;
            for (const auto& [m, row] : reactions.rows()) {
                const bool seen = std::any_of(row.begin(), row.end(),
                                              [&](const auto& r) { return community.contains(r.first); });
                if (seen) contents.push_back(m);
            }
            if (contents.empty()) continue;
            auto scored = score_community(fabric, community.id, reactions, contents, params, now);
            cards.insert(cards.end(), scored.begin(), scored.end());
        }
        if (!options.out.parent_path().empty()) fs::create_directories(options.out.parent_path());
        write_scorecards_csv(options.out, cards);
        return kExitOk;
    });
}

int cmd_compare(const CompareOptions& options, std::ostream& err) {
    return guarded(err, [&] {
        if (options.seeds < 1) throw ConfigError("--seeds", "must be >= 1");
        const auto baseline = parse_scorer(options.baseline_scorer);
        if (!baseline) {
            throw ConfigError("--baseline-scorer",
                              fmt::format("unknown scorer '{}' (valid: bridging, engagement)", options.baseline_scorer));
        }
        const ScenarioConfig base = load_scenario(options.scenario);

        struct Column {
            const char* name;
            double RoundMetrics::*field;
        };
        const Column columns[] = {
            {"common_belief_top_exposed", &RoundMetrics::common_belief_top_exposed},
            {"polarization_index", &RoundMetrics::polarization_index},
            {"attention_gini", &RoundMetrics::attention_gini},
            {"platform_revenue", &RoundMetrics::platform_revenue},
        };
        std::vector<std::array<int, 3>> signs(std::size(columns), {0, 0, 0});  // positive, negative, zero

        fs::create_directories(options.out);
        std::ofstream out(options.out / "comparison.csv", std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write comparison.csv");
        out << "seed";
        for (const auto& c : columns) out << ",bridging_" << c.name << ",baseline_" << c.name << ",delta_" << c.name;
        out << '\n';

        for (int s = 0; s < options.seeds; ++s) {
            ScenarioConfig bridging = base;
            bridging.seed = base.seed + static_cast<std::uint64_t>(s);
            bridging.scoring.params.scorer = Scorer::Bridging;
            ScenarioConfig engagement = bridging;
            engagement.scoring.params.scorer = *baseline;

            const RunResult a = run(bridging);
            const RunResult b = run(engagement);
            check_ledger(a);
            check_ledger(b);
            const RoundMetrics ma = a.metrics.empty() ? RoundMetrics{} : a.metrics.back();
            const RoundMetrics mb = b.metrics.empty() ? RoundMetrics{} : b.metrics.back();
            out << bridging.seed;
            for (std::size_t i = 0; i < std::size(columns); ++i) {
                const double x = ma.*columns[i].field;
                const double y = mb.*columns[i].field;
                const double d = x - y;
                out << fmt::format(",{},{},{}", x, y, d);
                ++signs[i][d > 0.0 ? 0 : (d < 0.0 ? 1 : 2)];
            }
            out << '\n';
        }
        out << "summary";
        for (const auto& s : signs) out << fmt::format(",,,{}+/{}-/{}=", s[0], s[1], s[2]);
        out << '\n';
        return kExitOk;
    });
}

int main(int argc, char** argv) {
    CLI::App app{"Communitarian feed ranking simulator"};
    app.require_subcommand(1);

    RunOptions run_opts;
    std::uint64_t seed = 0;
    int rounds = 0;
    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write run artifacts");
    run_cmd->add_option("--scenario", run_opts.scenario, "Scenario JSON file")->required();
    run_cmd->add_option("--out", run_opts.out, "Output directory")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the scenario seed");
    auto* rounds_opt = run_cmd->add_option("--rounds", rounds, "Override the number of rounds");

    ScoreOptions score_opts;
    auto* score_cmd = app.add_subcommand("score", "Score a reaction log against a fabric");
    score_cmd->add_option("--reactions", score_opts.reactions, "Reactions CSV")->required();
    score_cmd->add_option("--fabric", score_opts.fabric, "Fabric JSON")->required();
    score_cmd->add_option("--backend", score_opts.backend, "gac_uniform, gac_penrose or mf")->capture_default_str();
    score_cmd->add_option("--out", score_opts.out, "Output scorecards CSV")->required();

    CompareOptions cmp_opts;
    auto* cmp_cmd = app.add_subcommand("compare", "Paired-seed bridging vs baseline comparison");
    cmp_cmd->add_option("--scenario", cmp_opts.scenario, "Scenario JSON file")->required();
    cmp_cmd->add_option("--seeds", cmp_opts.seeds, "Number of paired seeds")->capture_default_str();
    cmp_cmd->add_option("--out", cmp_opts.out, "Output directory")->required();
    cmp_cmd->add_option("--baseline-scorer", cmp_opts.baseline_scorer, "Scorer of the baseline variant")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*run_cmd) {
        if (*seed_opt) run_opts.seed = seed;
        if (*rounds_opt) run_opts.rounds = rounds;
        return cmd_run(run_opts, std::cerr);
    }
    if (*score_cmd) return cmd_score(score_opts, std::cerr);
    return cmd_compare(cmp_opts, std::cerr);
}

}  // namespace plural::cli
