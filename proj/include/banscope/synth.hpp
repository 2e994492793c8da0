#pragma once

#include <cstdint>
#include <vector>

#include "banscope/graph.hpp"
#include "banscope/si_model.hpp"

namespace banscope {

/// Ego-graph-shaped random topology: a landmark, a depth-limited
/// attachment tree honoring the crawl fanout, then extra random edges
/// until the average undirected degree reaches the target. n is capped
/// by the crawl bound 1 + fanout + fanout^2.
EgoGraph ego_like_graph(int n, double target_avg_degree, std::uint64_t seed,
                        const std::string& landmark_id, int fanout = 33);

/// Simple k-regular random graph on n nodes (configuration model with
/// edge-swap repair). Requires n*k even and k < n.
EgoGraph k_regular_graph(int n, int k, std::uint64_t seed);

/// Graph sizes mimicking the collected-campaign profile: one mode of
/// small graphs, one of near-maximal ones, capped at 1123.
std::vector<int> bimodal_sizes(int count, std::uint64_t seed, int small_lo = 5,
                               int small_hi = 80, int large_mean = 1000, int large_sd = 90,
                               int max_size = 1123, double large_fraction = 0.5);

struct SynthOptions {
    int graphs = 500;
    double target_avg_degree = 6.0;
    std::uint64_t seed = 1;
};

/// A population of ban-free ego-like topologies with bimodal sizes.
PopulationDataset make_topology_population(const SynthOptions& options);

/// Topologies tuned so the SI process at `params` lands, in expectation,
/// on the target banned fraction: the average degree is adjusted until
/// the exact per-degree expectation matches. Returns the tuned dataset.
PopulationDataset calibrated_topology_population(int graphs, SIParams params, double target_mu,
                                                 std::uint64_t seed);

}  // namespace banscope
