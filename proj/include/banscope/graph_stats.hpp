#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "banscope/graph.hpp"

namespace banscope {

// Averages split by ban status. A group with no members yields nullopt,
// never a silent zero.
struct GroupAverage {
    std::optional<double> banned;
    std::optional<double> not_banned;
};

/// Fraction of banned nodes in one graph. Throws on an empty graph.
double sb_fraction(const EgoGraph& g);

/// Average undirected degree of banned vs non-banned nodes over all
/// graphs of a dataset.
GroupAverage degree_by_ban_status(const PopulationDataset& d);

/// Per-node fraction of banned neighbors, averaged within the banned
/// and non-banned groups. Degree-0 nodes are excluded (the fraction is
/// undefined for them).
GroupAverage neighbor_sb_fraction(const PopulationDataset& d);

/// Average local clustering coefficient; nodes with degree < 2 count 0.
double clustering_avg(const UndirectedView& view);
double clustering_avg(const EgoGraph& g);

/// Number of nodes left after iteratively deleting all nodes of
/// degree < 2.
std::size_t two_core_size(const UndirectedView& view);
std::size_t two_core_size(const EgoGraph& g);

// Ban types are indexed typeahead=0, search=1, ghost=2 throughout.
inline constexpr std::array<const char*, 3> kBanTypeNames = {"typeahead", "search", "ghost"};

/// Conditional co-occurrence of ban types over the unique users of a
/// dataset (users appearing in several graphs are counted once, keyed
/// by node id). conditional[i][j] = P(type j | type i); rows with a
/// zero total are NaN.
struct BanCooccurrence {
    std::array<std::int64_t, 3> totals{};
    std::array<std::array<double, 3>, 3> conditional{};
};

BanCooccurrence ban_cooccurrence(const PopulationDataset& d);

/// Per-graph topology summary row.
struct GraphTopology {
    std::string landmark;
    std::size_t nodes = 0;
    std::size_t undirected_edges = 0;
    double avg_degree = 0.0;
    double clustering = 0.0;
    std::size_t two_core = 0;
    double sb_fraction = 0.0;
};

GraphTopology graph_topology(const EgoGraph& g);

}  // namespace banscope
