#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "banscope/graph.hpp"
#include "banscope/si_model.hpp"

namespace banscope {

/// Monte-Carlo likelihood of H1 on one graph: the fraction of simulated
/// SI draws whose banned count equals the observed count exactly. The
/// resolution floor is 1/trials.
double likelihood_h1(const UndirectedView& view, std::int64_t observed_s, SIParams params,
                     int trials, std::uint64_t seed);
double likelihood_h1(const EgoGraph& g, SIParams params, int trials, std::uint64_t seed);

/// Exact H0 likelihood: the Binomial(n, mu) pmf at the observed count.
double likelihood_h0(const EgoGraph& g, double mu);

/// Probability-decade bins, edges descending from 1 to 0. A value v
/// falls in bin i when edges[i+1] < v <= edges[i]; the last bin also
/// absorbs exact zeros and is reported as "<edges[n-2]".
struct BinSpec {
    std::vector<double> edges = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 0.0};
    // Bins with lower edge >= likely_min count as "likely"; values at or
    // below unlikely_max as "unlikely".
    double likely_min = 1e-2;
    double unlikely_max = 1e-4;

    std::size_t bin_count() const { return edges.size() - 1; }
};

int bin_of(double value, const BinSpec& bins);
std::string bin_label(int bin, const BinSpec& bins);

struct LikelihoodReport {
    std::string landmark;
    std::int64_t n = 0;
    std::int64_t observed_s = 0;
    double l_h0 = 0.0;
    double l_h0_log10 = 0.0;
    double l_h1 = 0.0;
    int trials = 0;
    int bin_h0 = 0;
    int bin_h1 = 0;
};

struct HypothesisComparison {
    std::vector<LikelihoodReport> reports;
    std::vector<std::int64_t> h0_bin_counts;
    std::vector<std::int64_t> h1_bin_counts;
    double mu_hat = 0.0;
    // likely ratio: H1 likely-bin graphs over H0's; unlikely ratio: H0
    // unlikely-bin graphs over H1's. Both 1.0 when the counts tie at 0.
    double likely_ratio = 0.0;
    double unlikely_ratio = 0.0;
};

/// Estimates per-graph likelihoods under H0(mu-hat) and H1(params),
/// bins them, and reports the two count ratios.
HypothesisComparison bin_and_compare(const PopulationDataset& d, SIParams params, int trials,
                                     const BinSpec& bins, std::uint64_t seed, int workers);

}  // namespace banscope
