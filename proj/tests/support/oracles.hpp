#pragma once

// Independent reference implementations the tests check the library
// against. Everything here favours obvious correctness over speed and
// stays decoupled from the implementation paths under test.

#include <cstdint>
#include <string>
#include <vector>

#include "banscope/graph.hpp"

namespace oracles {

/// Binomial pmf through exact rational arithmetic on the binary value
/// of mu, rounded to double only at the end.
double rational_binomial_pmf(std::int64_t n, std::int64_t s, double mu);

/// Exact distribution of the final banned count of the one-step SI
/// process: enumeration over every initial-infection subset, candidates
/// folded in by polynomial convolution. Feasible up to ~15 nodes.
std::vector<double> si_exact_count_distribution(const banscope::UndirectedView& view, double p0,
                                                double beta);

/// Average local clustering coefficient by brute-force triangle checks.
double brute_clustering(const banscope::EgoGraph& g);

/// 2-core size by repeated full-scan peeling.
std::size_t brute_two_core(const banscope::EgoGraph& g);

/// One-sample Kolmogorov-Smirnov statistic against U[0,1].
double ks_statistic_uniform(std::vector<double> values);

/// Upper-tail chi-square p-value.
double chi_square_p_value(double statistic, int dof);

/// Graph from node count and undirected edge pairs (each pair stored
/// once as a directed edge; ids are "n0", "n1", ...).
banscope::EgoGraph make_graph(int nodes,
                              const std::vector<std::pair<int, int>>& edges);

}  // namespace oracles
