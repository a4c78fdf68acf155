#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "plural/cli.hpp"
#include "plural/io.hpp"

using namespace plural;
namespace fs = std::filesystem;

namespace {

fs::path scenario(const char* name) { return fs::path(PLURAL_SOURCE_DIR) / "scenarios" / name; }

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("plural_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(path));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

int run_main(std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("run writes five parseable artifacts") {
    const auto out = fresh_dir("run");
    std::ostringstream err;
    REQUIRE(cli::cmd_run({scenario("minimal.json"), out, {}, {}}, err) == cli::kExitOk);
    CHECK(err.str().empty());

    const auto metrics = csv_rows(out / "metrics.csv");
    REQUIRE(metrics.size() == 6);
    CHECK(metrics[0][0] == "round");
    CHECK(metrics[0][1] == "common_belief_top_exposed");
    for (std::size_t i = 1; i < metrics.size(); ++i) {
        CHECK(metrics[i].size() == metrics[0].size());
        CHECK(std::stoi(metrics[i][0]) == static_cast<int>(i - 1));
        for (std::size_t j = 1; j < metrics[i].size(); ++j) CHECK_NOTHROW((void)std::stod(metrics[i][j]));
    }

    std::istringstream feeds(slurp(out / "feeds.jsonl"));
    std::string line;
    int records = 0;
    while (std::getline(feeds, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("round"));
        CHECK(j.contains("citizen"));
        CHECK(j.contains("exposure_share"));
        CHECK(j.contains("rank_position"));
        CHECK(j.contains("content"));
        ++records;
    }
    CHECK(records > 0);

    const auto ledger = csv_rows(out / "ledger.csv");
    REQUIRE(!ledger.empty());
    CHECK(ledger[0] == std::vector<std::string>{"round", "from_kind", "from_id", "to_kind", "to_id", "amount", "reason"});
    for (std::size_t i = 1; i < ledger.size(); ++i) CHECK(std::stod(ledger[i][5]) > 0.0);

    const auto fabric = read_fabric_json(out / "fabric.json");
    CHECK(fabric.citizen_count() == 24);
    CHECK(fabric.audit().empty());

    const auto cards = csv_rows(out / "scorecards.csv");
    REQUIRE(!cards.empty());
    CHECK(cards[0] == std::vector<std::string>{"content_id", "scope_kind", "scope_id", "iota", "beta", "delta", "psi",
                                               "label", "characteristic_blocs"});
}

TEST_CASE("run is reproducible and the seed matters") {
    const auto a = fresh_dir("seed_a");
    const auto b = fresh_dir("seed_b");
    const auto c = fresh_dir("seed_c");
    std::ostringstream err;
    REQUIRE(cli::cmd_run({scenario("minimal.json"), a, 99u, {}}, err) == cli::kExitOk);
    REQUIRE(cli::cmd_run({scenario("minimal.json"), b, 99u, {}}, err) == cli::kExitOk);
    REQUIRE(cli::cmd_run({scenario("minimal.json"), c, {}, {}}, err) == cli::kExitOk);
    for (const char* f : {"metrics.csv", "feeds.jsonl", "ledger.csv", "fabric.json", "scorecards.csv"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "feeds.jsonl") != slurp(c / "feeds.jsonl"));

    const auto short_run = fresh_dir("rounds");
    REQUIRE(cli::cmd_run({scenario("minimal.json"), short_run, {}, 2}, err) == cli::kExitOk);
    CHECK(csv_rows(short_run / "metrics.csv").size() == 3);
}

TEST_CASE("configuration failures exit with 2") {
    const auto out = fresh_dir("missing");
    std::ostringstream err;
    CHECK(cli::cmd_run({"/no/such/scenario.json", out, {}, {}}, err) == cli::kExitConfig);
    CHECK(err.str().find("/no/such/scenario.json") != std::string::npos);

    const auto bad = out / "bad.json";
    std::ofstream(bad) << R"({"schema_version": 1, "population": {"citizens": -1}})";
    std::ostringstream err2;
    CHECK(cli::cmd_run({bad, out, {}, {}}, err2) == cli::kExitConfig);
    CHECK(err2.str().find("/population/citizens") != std::string::npos);

    CHECK(run_main({"plural"}) == cli::kExitConfig);
    CHECK(run_main({"plural", "run", "--scenario", "/no/such/scenario.json", "--out", out.string()}) ==
          cli::kExitConfig);
    CHECK(run_main({"plural", "run", "--out", out.string()}) == cli::kExitConfig);
}

namespace {

// Eight members split 4/4 into blocs; three contents with varied support.
void write_score_inputs(const fs::path& dir, bool with_reactions) {
    SocialFabric fabric;
    const CommunityId c = fabric.add_community(1.0);
    MemberSet left, right;
    for (int i = 0; i < 8; ++i) {
        const CitizenId p = fabric.add_citizen();
        fabric.add_membership(p, c, 1.0, 1.0);
        (i < 4 ? left : right).push_back(p);
    }
    fabric.set_principal_subcommunities(c, {left, right});
    write_fabric_json(dir / "fabric.json", fabric);
    std::ofstream out(dir / "reactions.csv", std::ios::binary);
    if (!with_reactions) return;
    out << "citizen_id,content_id,round,exposed,reaction\n";
    for (int i = 0; i < 8; ++i) {
        out << i << ",0,1,1,1\n";
        out << i << ",1,1,1," << (i < 4 ? 1 : -1) << '\n';
        out << i << ",2,2,1," << (i % 3 == 0 ? -1 : (i % 3 == 1 ? 0 : 1)) << '\n';
    }
}

std::vector<std::string> column(const std::vector<std::vector<std::string>>& rows, const std::string& name) {
    std::size_t idx = 0;
    while (rows[0][idx] != name) ++idx;
    std::vector<std::string> out;
    for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(rows[i][idx]);
    return out;
}

}  // namespace

TEST_CASE("offline scoring") {
    const auto dir = fresh_dir("score");
    write_score_inputs(dir, true);
    std::ostringstream err;
    REQUIRE(cli::cmd_score({dir / "reactions.csv", dir / "fabric.json", "gac_uniform", dir / "uniform.csv"}, err) ==
            cli::kExitOk);
    REQUIRE(cli::cmd_score({dir / "reactions.csv", dir / "fabric.json", "gac_penrose", dir / "penrose.csv"}, err) ==
            cli::kExitOk);
    const auto uniform = csv_rows(dir / "uniform.csv");
    const auto penrose = csv_rows(dir / "penrose.csv");
    REQUIRE(uniform.size() == 4);
    CHECK(column(uniform, "beta") == column(penrose, "beta"));
    CHECK(column(uniform, "label")[0] == "Bridging");
    CHECK(column(uniform, "label")[1] == "Divisive");
    CHECK(column(uniform, "characteristic_blocs")[1] == "0");

    REQUIRE(cli::cmd_score({dir / "reactions.csv", dir / "fabric.json", "mf", dir / "mf.csv"}, err) == cli::kExitOk);
    CHECK(csv_rows(dir / "mf.csv").size() == 4);

    std::ostringstream bad;
    CHECK(cli::cmd_score({dir / "reactions.csv", dir / "fabric.json", "pagerank", dir / "x.csv"}, bad) ==
          cli::kExitConfig);
    CHECK(bad.str().find("gac_uniform, gac_penrose, mf") != std::string::npos);
}

TEST_CASE("offline scoring of an empty log") {
    const auto dir = fresh_dir("score_empty");
    write_score_inputs(dir, false);
    std::ostringstream err;
    REQUIRE(cli::cmd_score({dir / "reactions.csv", dir / "fabric.json", "gac_penrose", dir / "cards.csv"}, err) ==
            cli::kExitOk);
    const auto rows = csv_rows(dir / "cards.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == "content_id");
}

TEST_CASE("malformed reactions are configuration errors") {
    const auto dir = fresh_dir("score_bad");
    write_score_inputs(dir, true);
    std::ofstream(dir / "reactions.csv", std::ios::app) << "3,4,1,0,1\n";  // reaction without exposure
    std::ostringstream err;
    CHECK(cli::cmd_score({dir / "reactions.csv", dir / "fabric.json", "gac_penrose", dir / "x.csv"}, err) ==
          cli::kExitConfig);
    CHECK(err.str().find("reactions.csv:26") != std::string::npos);
}

TEST_CASE("paired comparison") {
    const auto one = fresh_dir("compare_one");
    std::ostringstream err;
    REQUIRE(cli::cmd_compare({scenario("minimal.json"), 1, one, "engagement"}, err) == cli::kExitOk);
    const auto rows = csv_rows(one / "comparison.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "seed");
    CHECK(rows[0].size() == 13);
    CHECK(rows[1][0] == "7");
    CHECK(rows[2][0] == "summary");

    const auto same = fresh_dir("compare_same");
    REQUIRE(cli::cmd_compare({scenario("minimal.json"), 3, same, "bridging"}, err) == cli::kExitOk);
    const auto srows = csv_rows(same / "comparison.csv");
    REQUIRE(srows.size() == 5);
    for (std::size_t i = 1; i <= 3; ++i) {
        for (std::size_t j = 3; j < srows[i].size(); j += 3) CHECK(std::stod(srows[i][j]) == 0.0);
    }
    for (std::size_t j = 3; j < srows[4].size(); j += 3) CHECK(srows[4][j] == "0+/0-/3=");

    std::ostringstream bad;
    CHECK(cli::cmd_compare({scenario("minimal.json"), 0, same, "engagement"}, bad) == cli::kExitConfig);
    CHECK(cli::cmd_compare({scenario("minimal.json"), 1, same, "random"}, bad) == cli::kExitConfig);
}
