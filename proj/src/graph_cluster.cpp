#include <algorithm>
#include <map>

#include "plural/detect.hpp"
#include "plural/error.hpp"
#include "plural/rng.hpp"

namespace plural {

namespace {

// Symmetric weighted graph; a self loop of weight w is stored as adj[i][i] = 2w
// so that every row sums to the node degree.
struct LevelGraph {
    std::vector<std::map<std::size_t, double>> adj;
    std::vector<double> degree;
    double total = 0.0;  // 2m

    std::size_t size() const { return adj.size(); }

    void finalize() {
        degree.assign(adj.size(), 0.0);
        total = 0.0;
        for (std::size_t i = 0; i < adj.size(); ++i) {
            for (const auto& [_, w] : adj[i]) degree[i] += w;
            total += degree[i];
        }
    }
};

// One round of local moving. Returns true when any node changed community.
bool local_moving(const LevelGraph& g, std::vector<std::size_t>& label, double resolution, Rng& rng) {
    const std::size_t n = g.size();
    std::vector<double> tot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) tot[label[i]] += g.degree[i];

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    bool any_move = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i : order) {
            const std::size_t own = label[i];
            std::map<std::size_t, double> links;  // community → Σ weight from i, excluding self loop
            for (const auto& [j, w] : g.adj[i]) {
                if (j != i) links[label[j]] += w;
            }
            tot[own] -= g.degree[i];
            const double k_i = g.degree[i];
            auto gain = [&](std::size_t c) {
                auto it = links.find(c);
                const double k_in = it == links.end() ? 0.0 : it->second;
                return k_in - resolution * tot[c] * k_i / g.total;
            };
            std::size_t best = own;
            double best_gain = gain(own);
            for (const auto& [c, _] : links) {  // ascending community label
                const double v = gain(c);
                if (v > best_gain + 1e-12) {
                    best = c;
                    best_gain = v;
                }
            }
            tot[best] += k_i;
            if (best != own) {
                label[i] = best;
                improved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

}  // namespace

std::vector<MemberSet> graph_cluster(std::span<const WeightedEdge> edges, double resolution, std::uint64_t seed) {
    require(resolution > 0.0, ErrorCode::InvalidArgument, "resolution must be positive");
    if (edges.empty()) return {};

    std::vector<CitizenId> nodes;
    for (const auto& e : edges) {
        require(e.weight >= 0.0, ErrorCode::InvalidArgument, "edge weights must be non-negative");
        nodes.push_back(e.a);
        nodes.push_back(e.b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    auto index_of = [&](CitizenId c) {
        return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), c) - nodes.begin());
    };

    LevelGraph g;
    g.adj.resize(nodes.size());
    for (const auto& e : edges) {
        const std::size_t a = index_of(e.a);
        const std::size_t b = index_of(e.b);
        if (a == b) {
            g.adj[a][a] += 2.0 * e.weight;
        } else {
            g.adj[a][b] += e.weight;
            g.adj[b][a] += e.weight;
        }
    }
    g.finalize();
    if (g.total <= 0.0) {
        std::vector<MemberSet> singletons;
        for (CitizenId c : nodes) singletons.push_back({c});
        return singletons;
    }

    Rng rng(seed);
    std::vector<std::size_t> node_to_super(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) node_to_super[i] = i;

    while (true) {
        std::vector<std::size_t> label(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) label[i] = i;
        if (!local_moving(g, label, resolution, rng)) break;

        // Renumber communities densely in order of first appearance by node index.
        std::map<std::size_t, std::size_t> dense;
        for (std::size_t l : label) dense.try_emplace(l, dense.size());
        for (auto& l : label) l = dense[l];
        for (auto& s : node_to_super) s = label[s];

        LevelGraph next;
        next.adj.resize(dense.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (const auto& [j, w] : g.adj[i]) next.adj[label[i]][label[j]] += w;
        }
        next.finalize();
        if (next.size() == g.size()) break;
        g = std::move(next);
    }

    std::map<std::size_t, MemberSet> groups;
    for (std::size_t i = 0; i < nodes.size(); ++i) groups[node_to_super[i]].push_back(nodes[i]);
    std::vector<MemberSet> out;
    for (auto& [_, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end(), [](const MemberSet& a, const MemberSet& b) { return a.front() < b.front(); });
    return out;
}

}  // namespace plural
