#include "plural/config.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <set>

#include "plural/error.hpp"

namespace plural {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string pointer(const std::string& path) { return path.empty() ? "/" : path; }

// Object reader that remembers which keys were consumed so leftovers can be
// reported as unknown.
class Node {
public:
    Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {
        if (!value_.is_object()) throw ConfigError(pointer(path_), "expected an object");
    }

    std::string at(std::string_view key) const { return fmt::format("{}/{}", path_, key); }

    const json* find(const char* key) {
        used_.insert(key);
        auto it = value_.find(key);
        return it == value_.end() ? nullptr : &*it;
    }

    double number(const char* key, double fallback, double lo, double hi) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) throw ConfigError(at(key), "expected a number");
        const double x = v->get<double>();
        if (!std::isfinite(x) || x < lo || x > hi) {
            throw ConfigError(at(key), fmt::format("value {} outside [{}, {}]", x, lo, hi));
        }
        return x;
    }

    int integer(const char* key, int fallback, int lo, int hi) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
        const auto x = v->get<std::int64_t>();
        if (x < lo || x > hi) throw ConfigError(at(key), fmt::format("value {} outside [{}, {}]", x, lo, hi));
        return static_cast<int>(x);
    }

    bool boolean(const char* key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const char* key, std::string fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(at(key), "expected a string");
        return v->get<std::string>();
    }

    const json* array(const char* key) {
        const json* v = find(key);
        if (v && !v->is_array()) throw ConfigError(at(key), "expected an array");
        return v;
    }

    void done() const {
        for (const auto& [k, _] : value_.items()) {
            if (!used_.contains(k)) throw ConfigError(at(k), "unknown key");
        }
    }

private:
    const json& value_;
    std::string path_;
    std::set<std::string, std::less<>> used_;
};

Funding parse_funding(const std::string& name, const std::string& path) {
    if (name == "self_paid") return Funding::SelfPaid;
    if (name == "ad_funded") return Funding::AdFunded;
    throw ConfigError(path, fmt::format("unknown funding '{}' (valid: self_paid, ad_funded)", name));
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
            throw ConfigError(fmt::format("{}/{}", path, i), "expected a finite number");
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

PopulationConfig parse_population(const json& v, const std::string& path) {
    Node n(v, path);
    PopulationConfig p;
    p.citizens = n.integer("citizens", p.citizens, 0, 100000);
    p.dimensions = n.integer("dimensions", p.dimensions, 1, 64);
    if (const json* blocs = n.array("blocs")) {
        for (std::size_t i = 0; i < blocs->size(); ++i) {
            const std::string bp = fmt::format("{}/{}", n.at("blocs"), i);
            Node b((*blocs)[i], bp);
            BlocTemplate t;
            t.name = b.string("name", "");
            const json* center = b.find("center");
            if (!center) throw ConfigError(b.at("center"), "required");
            t.center = number_list(*center, b.at("center"));
            if (static_cast<int>(t.center.size()) != p.dimensions) {
                throw ConfigError(b.at("center"), fmt::format("expected {} coordinates, got {}", p.dimensions,
                                                              t.center.size()));
            }
            t.sigma = b.number("sigma", t.sigma, 0.0, kInf);
            t.share = b.number("share", t.share, 1e-12, kInf);
            b.done();
            p.blocs.push_back(std::move(t));
        }
    }
    if (p.citizens > 0 && p.blocs.empty()) throw ConfigError(n.at("blocs"), "at least one bloc is required");
    p.initial_standing = n.number("initial_standing", p.initial_standing, 1e-3, kInf);
    p.devotion_min = n.number("devotion_min", p.devotion_min, 1e-6, kInf);
    p.devotion_max = n.number("devotion_max", p.devotion_max, p.devotion_min, kInf);
    p.citizen_lambda = n.number("citizen_lambda", p.citizen_lambda, 0.0, kInf);
    p.citizen_funding = parse_funding(n.string("citizen_funding", "self_paid"), n.at("citizen_funding"));
    p.citizen_price = n.number("citizen_price", p.citizen_price, 0.0, kInf);
    p.citizen_balance = n.number("citizen_balance", p.citizen_balance, 0.0, kInf);
    p.personal_ads_share = n.number("personal_ads_share", p.personal_ads_share, 0.0, 1.0);
    p.subscriber_share = n.number("subscriber_share", p.subscriber_share, 0.0, 1.0);
    n.done();
    return p;
}

CommunityTemplate parse_community(const json& v, const std::string& path, std::size_t bloc_count) {
    Node n(v, path);
    CommunityTemplate c;
    c.name = n.string("name", "");
    const json* blocs = n.array("blocs");
    if (!blocs || blocs->empty()) throw ConfigError(n.at("blocs"), "at least one bloc index is required");
    for (std::size_t i = 0; i < blocs->size(); ++i) {
        const auto& b = (*blocs)[i];
        const std::string bp = fmt::format("{}/{}", n.at("blocs"), i);
        if (!b.is_number_integer() || b.get<std::int64_t>() < 0 ||
            b.get<std::int64_t>() >= static_cast<std::int64_t>(bloc_count)) {
            throw ConfigError(bp, fmt::format("expected a bloc index in [0, {})", bloc_count));
        }
        const int idx = b.get<int>();
        if (std::find(c.blocs.begin(), c.blocs.end(), idx) != c.blocs.end()) throw ConfigError(bp, "duplicate bloc");
        c.blocs.push_back(idx);
    }
    c.membership_rate = n.number("membership_rate", c.membership_rate, 1e-12, 1.0);
    c.lambda = n.number("lambda", c.lambda, 0.0, kInf);
    c.funding = parse_funding(n.string("funding", "self_paid"), n.at("funding"));
    c.price = n.number("price", c.price, 0.0, kInf);
    c.balance = n.number("balance", c.balance, 0.0, kInf);
    c.admin_registered = n.boolean("admin_registered", c.admin_registered);
    n.done();
    return c;
}

int community_index(Node& n, const char* key, std::size_t community_count) {
    if (!n.find(key)) throw ConfigError(n.at(key), "required");
    return n.integer(key, 0, 0, static_cast<int>(community_count) - 1);
}

AdvertiserConfig parse_advertiser(const json& v, const std::string& path, std::size_t community_count) {
    Node n(v, path);
    AdvertiserConfig a;
    a.budget = n.number("budget", a.budget, 0.0, kInf);
    if (const json* deals = n.array("deals")) {
        for (std::size_t i = 0; i < deals->size(); ++i) {
            Node d((*deals)[i], fmt::format("{}/{}", n.at("deals"), i));
            DealConfig deal;
            deal.community = community_index(d, "community", community_count);
            deal.price = d.number("price", deal.price, 0.0, kInf);
            deal.accepted = d.boolean("accepted", deal.accepted);
            d.done();
            a.deals.push_back(deal);
        }
    }
    a.citizen_targeting = n.boolean("citizen_targeting", a.citizen_targeting);
    a.citizen_price = n.number("citizen_price", a.citizen_price, 0.0, kInf);
    a.ads_per_round = n.integer("ads_per_round", a.ads_per_round, 0, 10000);
    a.stake = n.number("stake", a.stake, 0.0, kInf);
    a.position_spread = n.number("position_spread", a.position_spread, 0.0, kInf);
    if (const json* buys = n.array("standing_purchases")) {
        for (std::size_t i = 0; i < buys->size(); ++i) {
            Node s((*buys)[i], fmt::format("{}/{}", n.at("standing_purchases"), i));
            StandingPurchaseConfig buy;
            buy.community = community_index(s, "community", community_count);
            buy.amount = s.number("amount", buy.amount, 1e-12, kInf);
            buy.price = s.number("price", buy.price, 1e-12, kInf);
            s.done();
            a.standing_purchases.push_back(buy);
        }
    }
    n.done();
    return a;
}

ContentConfig parse_content(const json& v, const std::string& path, std::size_t community_count) {
    Node n(v, path);
    ContentConfig c;
    c.posts_per_round = n.integer("posts_per_round", c.posts_per_round, 0, 100000);
    c.topics = n.integer("topics", c.topics, 1, 100000);
    c.stake_min = n.number("stake_min", c.stake_min, 0.0, kInf);
    c.stake_max = n.number("stake_max", c.stake_max, c.stake_min, kInf);
    c.position_noise = n.number("position_noise", c.position_noise, 0.0, kInf);
    if (const json* ads = n.array("advertisers")) {
        for (std::size_t i = 0; i < ads->size(); ++i) {
            c.advertisers.push_back(parse_advertiser((*ads)[i], fmt::format("{}/{}", n.at("advertisers"), i),
                                                     community_count));
        }
    }
    n.done();
    return c;
}

ScoringConfig parse_scoring(const json& v, const std::string& path) {
    Node n(v, path);
    ScoringConfig s;
    auto& p = s.params;
    const std::string scorer = n.string("scorer", std::string(to_string(p.scorer)));
    if (auto parsed = parse_scorer(scorer)) p.scorer = *parsed;
    else throw ConfigError(n.at("scorer"), fmt::format("unknown scorer '{}' (valid: bridging, engagement)", scorer));
    const std::string backend = n.string("backend", std::string(to_string(p.backend)));
    if (auto parsed = parse_backend(backend)) p.backend = *parsed;
    else throw ConfigError(n.at("backend"), fmt::format("unknown backend '{}' (valid: {})", backend, kBackendNames));
    p.alpha = n.number("alpha", p.alpha, 0.0, kInf);
    p.label_floor = n.number("label_floor", p.label_floor, 0.0, 1.0);
    p.half_life = n.number("half_life", p.half_life, 1e-9, kInf);
    if (const json* mf = n.find("mf")) {
        Node m(*mf, n.at("mf"));
        p.mf.reg = m.number("reg", p.mf.reg, 0.0, kInf);
        p.mf.epochs = m.integer("epochs", p.mf.epochs, 1, 1000000);
        p.mf.lr = m.number("lr", p.mf.lr, 1e-12, 10.0);
        p.mf.lr_decay = m.number("lr_decay", p.mf.lr_decay, 0.0, kInf);
        if (const json* seed = m.find("seed")) {
            if (!seed->is_number_unsigned()) throw ConfigError(m.at("seed"), "expected a non-negative integer");
            p.mf.seed = seed->get<std::uint64_t>();
        }
        m.done();
    }
    s.balancing_delta_tol = n.number("balancing_delta_tol", s.balancing_delta_tol, 0.0, 1.0);
    s.balancing_topic_overlap = n.boolean("balancing_topic_overlap", s.balancing_topic_overlap);
    if (const json* d = n.find("detect")) {
        Node m(*d, n.at("detect"));
        s.detect.max_columns = m.integer("max_columns", s.detect.max_columns, 2, 100000);
        s.detect.min_reactors = m.integer("min_reactors", s.detect.min_reactors, 1, 100000);
        m.done();
    }
    n.done();
    return s;
}

RankingConfig parse_ranking(const json& v, const std::string& path) {
    Node n(v, path);
    RankingConfig r;
    r.k = n.integer("k", r.k, 1, 100000);
    r.epsilon = n.number("epsilon", r.epsilon, 0.0, 1.0 - 1e-12);
    r.seeding.stake_scale = n.number("stake_scale", r.seeding.stake_scale, 0.0, kInf);
    r.seeding.seed_rounds = n.integer("seed_rounds", r.seeding.seed_rounds, 0, 100000);
    n.done();
    return r;
}

EconParams parse_econ(const json& v, const std::string& path) {
    Node n(v, path);
    EconParams e;
    e.platform_fee = n.number("platform_fee", e.platform_fee, 0.0, 1.0);
    e.creator_share = n.number("creator_share", e.creator_share, 0.0, 1.0);
    if (e.platform_fee + e.creator_share > 1.0 + 1e-12) {
        throw ConfigError(n.at("creator_share"), "platform_fee + creator_share must not exceed 1");
    }
    e.price_per_lambda_impression = n.number("price", e.price_per_lambda_impression, 0.0, kInf);
    e.reward_rate = n.number("reward_rate", e.reward_rate, 0.0, kInf);
    n.done();
    return e;
}

SimConfig parse_sim(const json& v, const std::string& path) {
    Node n(v, path);
    SimConfig s;
    s.rounds = n.integer("rounds", s.rounds, 0, 100000);
    s.refresh_interval = n.integer("refresh_interval", s.refresh_interval, 1, 100000);
    s.gamma = n.number("gamma", s.gamma, 0.0, 1.0);
    s.temperature = n.number("temperature", s.temperature, 1e-9, kInf);
    s.attitude_bias = n.number("attitude_bias", s.attitude_bias, -1e6, 1e6);
    s.engagement_scale = n.number("engagement_scale", s.engagement_scale, 0.0, kInf);
    s.top_exposed = n.integer("top_exposed", s.top_exposed, 1, 100000);
    s.coherence_top = n.integer("coherence_top", s.coherence_top, 1, 100000);
    n.done();
    return s;
}

json funding_json(Funding f) { return std::string(to_string(f)); }

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
    Node root(doc, "");
    const json* version = root.find("schema_version");
    if (!version) throw ConfigError("/schema_version", "required");
    if (!version->is_number_integer() || version->get<std::int64_t>() != kSchemaVersion) {
        throw ConfigError("/schema_version", fmt::format("unsupported schema version (expected {})", kSchemaVersion));
    }
    ScenarioConfig c;
    if (const json* seed = root.find("seed")) {
        if (!seed->is_number_unsigned()) throw ConfigError("/seed", "expected a non-negative integer");
        c.seed = seed->get<std::uint64_t>();
    }
    if (const json* p = root.find("population")) c.population = parse_population(*p, "/population");
    if (const json* list = root.array("communities")) {
        for (std::size_t i = 0; i < list->size(); ++i) {
            c.communities.push_back(
                parse_community((*list)[i], fmt::format("/communities/{}", i), c.population.blocs.size()));
        }
    }
    if (const json* v = root.find("content")) c.content = parse_content(*v, "/content", c.communities.size());
    if (const json* v = root.find("scoring")) c.scoring = parse_scoring(*v, "/scoring");
    if (const json* v = root.find("ranking")) c.ranking = parse_ranking(*v, "/ranking");
    if (const json* v = root.find("econ")) c.econ = parse_econ(*v, "/econ");
    if (const json* v = root.find("sim")) c.sim = parse_sim(*v, "/sim");
    root.done();
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open scenario file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), e.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const ScenarioConfig& c) {
    json blocs = json::array();
    for (const auto& b : c.population.blocs) {
        blocs.push_back({{"name", b.name}, {"center", b.center}, {"sigma", b.sigma}, {"share", b.share}});
    }
    const auto& p = c.population;
    json population = {
        {"citizens", p.citizens},
        {"dimensions", p.dimensions},
        {"blocs", blocs},
        {"initial_standing", p.initial_standing},
        {"devotion_min", p.devotion_min},
        {"devotion_max", p.devotion_max},
        {"citizen_lambda", p.citizen_lambda},
        {"citizen_funding", funding_json(p.citizen_funding)},
        {"citizen_price", p.citizen_price},
        {"citizen_balance", p.citizen_balance},
        {"personal_ads_share", p.personal_ads_share},
        {"subscriber_share", p.subscriber_share},
    };
    json communities = json::array();
    for (const auto& t : c.communities) {
        communities.push_back({
            {"name", t.name},
            {"blocs", t.blocs},
            {"membership_rate", t.membership_rate},
            {"lambda", t.lambda},
            {"funding", funding_json(t.funding)},
            {"price", t.price},
            {"balance", t.balance},
            {"admin_registered", t.admin_registered},
        });
    }
    json advertisers = json::array();
    for (const auto& a : c.content.advertisers) {
        json deals = json::array();
        for (const auto& d : a.deals) {
            deals.push_back({{"community", d.community}, {"price", d.price}, {"accepted", d.accepted}});
        }
        json buys = json::array();
        for (const auto& s : a.standing_purchases) {
            buys.push_back({{"community", s.community}, {"amount", s.amount}, {"price", s.price}});
        }
        advertisers.push_back({
            {"budget", a.budget},
            {"deals", deals},
            {"citizen_targeting", a.citizen_targeting},
            {"citizen_price", a.citizen_price},
            {"ads_per_round", a.ads_per_round},
            {"stake", a.stake},
            {"position_spread", a.position_spread},
            {"standing_purchases", buys},
        });
    }
    const auto& sp = c.scoring.params;
    const auto& d = c.scoring.detect;
    return {
        {"schema_version", kSchemaVersion},
        {"seed", c.seed},
        {"population", population},
        {"communities", communities},
        {"content",
         {{"posts_per_round", c.content.posts_per_round},
          {"topics", c.content.topics},
          {"stake_min", c.content.stake_min},
          {"stake_max", c.content.stake_max},
          {"position_noise", c.content.position_noise},
          {"advertisers", advertisers}}},
        {"scoring",
         {{"scorer", std::string(to_string(sp.scorer))},
          {"backend", std::string(to_string(sp.backend))},
          {"alpha", sp.alpha},
          {"label_floor", sp.label_floor},
          {"half_life", sp.half_life},
          {"mf", {{"reg", sp.mf.reg}, {"epochs", sp.mf.epochs}, {"lr", sp.mf.lr}, {"lr_decay", sp.mf.lr_decay},
                  {"seed", sp.mf.seed}}},
          {"balancing_delta_tol", c.scoring.balancing_delta_tol},
          {"balancing_topic_overlap", c.scoring.balancing_topic_overlap},
          {"detect", {{"max_columns", d.max_columns}, {"min_reactors", d.min_reactors}}}}},
        {"ranking",
         {{"k", c.ranking.k},
          {"epsilon", c.ranking.epsilon},
          {"stake_scale", c.ranking.seeding.stake_scale},
          {"seed_rounds", c.ranking.seeding.seed_rounds}}},
        {"econ",
         {{"platform_fee", c.econ.platform_fee},
          {"creator_share", c.econ.creator_share},
          {"price", c.econ.price_per_lambda_impression},
          {"reward_rate", c.econ.reward_rate}}},
        {"sim",
         {{"rounds", c.sim.rounds},
          {"refresh_interval", c.sim.refresh_interval},
          {"gamma", c.sim.gamma},
          {"temperature", c.sim.temperature},
          {"attitude_bias", c.sim.attitude_bias},
          {"engagement_scale", c.sim.engagement_scale},
          {"top_exposed", c.sim.top_exposed},
          {"coherence_top", c.sim.coherence_top}}},
    };
}

}  // namespace plural
