#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace banscope {

// Profile feature values keyed by feature name; booleans stored as 0/1.
// Unknown names are preserved verbatim.
using FeatureVector = std::map<std::string, double>;

struct BanProfile {
    bool typeahead = false;
    bool search = false;
    bool ghost = false;

    // A user is banned as soon as one restriction holds.
    bool banned() const { return typeahead || search || ghost; }
    bool operator==(const BanProfile&) const = default;
};

struct Node {
    std::string id;
    BanProfile bans;
    std::optional<FeatureVector> features;
};

/// Interaction graph sampled around a landmark user. Directed edge
/// (u, v) means v replied to or retweeted u. Node ids are unique
/// within one graph; edges reference nodes by dense index.
class EgoGraph {
public:
    std::string landmark;
    std::int64_t crawl_time = 0;
    std::vector<Node> nodes;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;

    EgoGraph() = default;
    explicit EgoGraph(std::string landmark_id) : landmark(std::move(landmark_id)) {
        add_node(Node{landmark, {}, std::nullopt});
    }

    int find(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? -1 : it->second;
    }

    int add_node(Node node) {
        if (node.id.empty()) throw std::invalid_argument("node id must be non-empty");
        if (index_.contains(node.id))
            throw std::invalid_argument("duplicate node id: " + node.id);
        int idx = static_cast<int>(nodes.size());
        index_.emplace(node.id, idx);
        nodes.push_back(std::move(node));
        return idx;
    }

    int ensure_node(const std::string& id) {
        int idx = find(id);
        return idx >= 0 ? idx : add_node(Node{id, {}, std::nullopt});
    }

    void add_edge(int src, int dst) {
        if (src < 0 || dst < 0 || src >= static_cast<int>(nodes.size()) ||
            dst >= static_cast<int>(nodes.size()))
            throw std::out_of_range("edge endpoint out of range");
        if (src == dst) throw std::invalid_argument("self-loop on node " + nodes[src].id);
        edges.emplace_back(src, dst);
    }

    std::size_t node_count() const { return nodes.size(); }

    // Rebuilds the id index after direct manipulation of `nodes`.
    void reindex() {
        index_.clear();
        for (std::size_t i = 0; i < nodes.size(); ++i)
            index_.emplace(nodes[i].id, static_cast<int>(i));
    }

private:
    std::unordered_map<std::string, int> index_;
};

/// An undirected, deduplicated adjacency over an EgoGraph in CSR form.
/// Parallel directed pairs collapse to one undirected edge.
struct UndirectedView {
    int node_count = 0;
    std::vector<std::int32_t> offsets;    // size node_count + 1
    std::vector<std::int32_t> neighbors;  // sorted within each row

    std::span<const std::int32_t> row(int v) const {
        return {neighbors.data() + offsets[v], neighbors.data() + offsets[v + 1]};
    }
    int degree(int v) const { return offsets[v + 1] - offsets[v]; }
    std::size_t edge_count() const { return neighbors.size() / 2; }
};

UndirectedView undirected_view(const EgoGraph& g);

/// A named collection of ego-graphs from one crawl campaign.
struct PopulationDataset {
    std::string population;      // RANDOM/BOTS/FAMOUS/DEPUTEES or user-defined
    std::string crawl_campaign;  // free text, also carries synthetic ground truth
    std::int64_t created = 0;
    std::vector<EgoGraph> graphs;

    std::size_t total_nodes() const {
        std::size_t n = 0;
        for (const auto& g : graphs) n += g.node_count();
        return n;
    }
};

}  // namespace banscope
