#include "banscope/graph_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace banscope {

double sb_fraction(const EgoGraph& g) {
    if (g.nodes.empty()) throw std::invalid_argument("sb_fraction on empty graph");
    std::size_t banned = 0;
    for (const auto& n : g.nodes)
        if (n.bans.banned()) ++banned;
    return static_cast<double>(banned) / static_cast<double>(g.nodes.size());
}

GroupAverage degree_by_ban_status(const PopulationDataset& d) {
    if (d.graphs.empty()) throw std::invalid_argument("degree_by_ban_status on empty dataset");
    double sum[2] = {0, 0};
    std::size_t count[2] = {0, 0};
    for (const auto& g : d.graphs) {
        UndirectedView view = undirected_view(g);
        for (int v = 0; v < view.node_count; ++v) {
            int group = g.nodes[v].bans.banned() ? 0 : 1;
            sum[group] += view.degree(v);
            ++count[group];
        }
    }
    GroupAverage out;
    if (count[0] > 0) out.banned = sum[0] / static_cast<double>(count[0]);
    if (count[1] > 0) out.not_banned = sum[1] / static_cast<double>(count[1]);
    return out;
}

GroupAverage neighbor_sb_fraction(const PopulationDataset& d) {
    if (d.graphs.empty()) throw std::invalid_argument("neighbor_sb_fraction on empty dataset");
    double sum[2] = {0, 0};
    std::size_t count[2] = {0, 0};
    for (const auto& g : d.graphs) {
        UndirectedView view = undirected_view(g);
        for (int v = 0; v < view.node_count; ++v) {
            int deg = view.degree(v);
            if (deg == 0) continue;
            int banned_neighbors = 0;
            for (std::int32_t u : view.row(v))
                if (g.nodes[u].bans.banned()) ++banned_neighbors;
            int group = g.nodes[v].bans.banned() ? 0 : 1;
            sum[group] += static_cast<double>(banned_neighbors) / deg;
            ++count[group];
        }
    }
    GroupAverage out;
    if (count[0] > 0) out.banned = sum[0] / static_cast<double>(count[0]);
    if (count[1] > 0) out.not_banned = sum[1] / static_cast<double>(count[1]);
    return out;
}

double clustering_avg(const UndirectedView& view) {
    if (view.node_count == 0) return 0.0;
    double total = 0.0;
    for (int v = 0; v < view.node_count; ++v) {
        int deg = view.degree(v);
        if (deg < 2) continue;
        auto nbrs = view.row(v);
        std::size_t links = 0;
        // Rows are sorted, so neighbor-pair membership is a binary search.
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            auto wrow = view.row(nbrs[i]);
            for (std::size_t j = i + 1; j < nbrs.size(); ++j)
                if (std::binary_search(wrow.begin(), wrow.end(), nbrs[j])) ++links;
        }
        total += 2.0 * static_cast<double>(links) / (static_cast<double>(deg) * (deg - 1));
    }
    return total / view.node_count;
}

double clustering_avg(const EgoGraph& g) { return clustering_avg(undirected_view(g)); }

std::size_t two_core_size(const UndirectedView& view) {
    std::vector<int> degree(view.node_count);
    std::vector<std::int32_t> stack;
    for (int v = 0; v < view.node_count; ++v) {
        degree[v] = view.degree(v);
        if (degree[v] < 2) stack.push_back(v);
    }
    std::vector<char> removed(view.node_count, 0);
    std::size_t remaining = view.node_count;
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        if (removed[v]) continue;
        removed[v] = 1;
        --remaining;
        for (std::int32_t u : view.row(v)) {
            if (removed[u]) continue;
            if (--degree[u] == 1) stack.push_back(u);  // 2 -> 1 transition queues u
        }
    }
    return remaining;
}

std::size_t two_core_size(const EgoGraph& g) { return two_core_size(undirected_view(g)); }

BanCooccurrence ban_cooccurrence(const PopulationDataset& d) {
    if (d.graphs.empty()) throw std::invalid_argument("ban_cooccurrence on empty dataset");
    std::unordered_map<std::string, BanProfile> seen;
    for (const auto& g : d.graphs)
        for (const auto& n : g.nodes) seen.emplace(n.id, n.bans);

    std::int64_t both[3][3] = {};
    BanCooccurrence out;
    for (const auto& [id, bans] : seen) {
        bool flag[3] = {bans.typeahead, bans.search, bans.ghost};
        for (int i = 0; i < 3; ++i) {
            if (!flag[i]) continue;
            ++out.totals[i];
            for (int j = 0; j < 3; ++j)
                if (flag[j]) ++both[i][j];
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.conditional[i][j] = out.totals[i] > 0
                                        ? static_cast<double>(both[i][j]) / out.totals[i]
                                        : std::numeric_limits<double>::quiet_NaN();
    return out;
}

GraphTopology graph_topology(const EgoGraph& g) {
    UndirectedView view = undirected_view(g);
    GraphTopology t;
    t.landmark = g.landmark;
    t.nodes = g.node_count();
    t.undirected_edges = view.edge_count();
    t.avg_degree = t.nodes == 0 ? 0.0 : 2.0 * static_cast<double>(t.undirected_edges) / t.nodes;
    t.clustering = clustering_avg(view);
    t.two_core = two_core_size(view);
    t.sb_fraction = sb_fraction(g);
    return t;
}

}  // namespace banscope
