#include "banscope/graph.hpp"

#include <algorithm>

namespace banscope {

UndirectedView undirected_view(const EgoGraph& g) {
    UndirectedView view;
    view.node_count = static_cast<int>(g.node_count());

    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    pairs.reserve(g.edges.size());
    for (auto [a, b] : g.edges) {
        if (a == b) continue;
        pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<std::int32_t> degree(view.node_count, 0);
    for (auto [a, b] : pairs) {
        ++degree[a];
        ++degree[b];
    }
    view.offsets.assign(view.node_count + 1, 0);
    for (int v = 0; v < view.node_count; ++v) view.offsets[v + 1] = view.offsets[v] + degree[v];
    view.neighbors.resize(pairs.size() * 2);

    std::vector<std::int32_t> cursor(view.offsets.begin(), view.offsets.end() - 1);
    for (auto [a, b] : pairs) {
        view.neighbors[cursor[a]++] = b;
        view.neighbors[cursor[b]++] = a;
    }
    for (int v = 0; v < view.node_count; ++v) {
        auto begin = view.neighbors.begin() + view.offsets[v];
        auto end = view.neighbors.begin() + view.offsets[v + 1];
        std::sort(begin, end);
    }
    return view;
}

}  // namespace banscope
