#include "banscope/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "banscope/binomial_test.hpp"
#include "banscope/parallel.hpp"
#include "banscope/rng.hpp"

namespace banscope {

namespace {

std::int64_t banned_count(const EgoGraph& g) {
    std::int64_t s = 0;
    for (const auto& n : g.nodes)
        if (n.bans.banned()) ++s;
    return s;
}

}  // namespace

double likelihood_h1(const UndirectedView& view, std::int64_t observed_s, SIParams params,
                     int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("likelihood_h1 needs trials >= 1");
    std::int64_t hits = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<char> banned = si_simulate(view, params, derive_seed(seed, 0, t));
        std::int64_t s = 0;
        for (char f : banned) s += f;
        if (s == observed_s) ++hits;
    }
    return static_cast<double>(hits) / trials;
}

double likelihood_h1(const EgoGraph& g, SIParams params, int trials, std::uint64_t seed) {
    return likelihood_h1(undirected_view(g), banned_count(g), params, trials, seed);
}

double likelihood_h0(const EgoGraph& g, double mu) {
    return binomial_pmf(static_cast<std::int64_t>(g.node_count()), banned_count(g), mu);
}

int bin_of(double value, const BinSpec& bins) {
    const auto& e = bins.edges;
    if (e.size() < 2) throw std::invalid_argument("bin spec needs at least two edges");
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
        if (value > e[i + 1]) return static_cast<int>(i);
    return static_cast<int>(e.size()) - 2;  // zeros land in the lowest bin
}

std::string bin_label(int bin, const BinSpec& bins) {
    char buf[64];
    if (bin == static_cast<int>(bins.bin_count()) - 1) {
        std::snprintf(buf, sizeof buf, "<%g", bins.edges[bins.edges.size() - 2]);
    } else {
        std::snprintf(buf, sizeof buf, "(%g,%g]", bins.edges[bin + 1], bins.edges[bin]);
    }
    return buf;
}

HypothesisComparison bin_and_compare(const PopulationDataset& d, SIParams params, int trials,
                                     const BinSpec& bins, std::uint64_t seed, int workers) {
    if (bins.edges.size() < 2 || !std::is_sorted(bins.edges.rbegin(), bins.edges.rend()))
        throw std::invalid_argument("bin edges must be descending");
    HypothesisComparison out;
    out.mu_hat = estimate_mu(d);
    out.h0_bin_counts.assign(bins.bin_count(), 0);
    out.h1_bin_counts.assign(bins.bin_count(), 0);
    out.reports.resize(d.graphs.size());

    parallel_for(d.graphs.size(), workers, [&](std::size_t gi) {
        const EgoGraph& g = d.graphs[gi];
        UndirectedView view = undirected_view(g);
        LikelihoodReport r;
        r.landmark = g.landmark;
        r.n = static_cast<std::int64_t>(g.node_count());
        r.observed_s = banned_count(g);
        r.l_h0 = binomial_pmf(r.n, r.observed_s, out.mu_hat);
        r.l_h0_log10 = log10_binomial_pmf(r.n, r.observed_s, out.mu_hat);
        r.l_h1 = likelihood_h1(view, r.observed_s, params, trials, derive_seed(seed, gi));
        r.trials = trials;
        r.bin_h0 = bin_of(r.l_h0, bins);
        r.bin_h1 = bin_of(r.l_h1, bins);
        out.reports[gi] = std::move(r);
    });

    for (const auto& r : out.reports) {
        ++out.h0_bin_counts[r.bin_h0];
        ++out.h1_bin_counts[r.bin_h1];
    }

    std::int64_t likely_h0 = 0, likely_h1 = 0, unlikely_h0 = 0, unlikely_h1 = 0;
    for (std::size_t b = 0; b < bins.bin_count(); ++b) {
        bool likely = bins.edges[b + 1] >= bins.likely_min;
        bool unlikely = bins.edges[b] <= bins.unlikely_max ||
                        b == bins.bin_count() - 1;  // the underflow bin
        if (likely) {
            likely_h0 += out.h0_bin_counts[b];
            likely_h1 += out.h1_bin_counts[b];
        }
        if (unlikely) {
            unlikely_h0 += out.h0_bin_counts[b];
            unlikely_h1 += out.h1_bin_counts[b];
        }
    }
    auto ratio = [](std::int64_t num, std::int64_t den) {
        if (num == den) return 1.0;  // covers the 0/0 case
        if (den == 0) return std::numeric_limits<double>::infinity();
        return static_cast<double>(num) / static_cast<double>(den);
    };
    out.likely_ratio = ratio(likely_h1, likely_h0);
    out.unlikely_ratio = ratio(unlikely_h0, unlikely_h1);
    return out;
}

}  // namespace banscope
