#include "banscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "banscope/rng.hpp"

namespace banscope {

namespace {

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

template <typename T>
void shuffle_vec(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[next_below(rng, i)]);
}

}  // namespace

EgoGraph ego_like_graph(int n, double target_avg_degree, std::uint64_t seed,
                        const std::string& landmark_id, int fanout) {
    if (n < 1) throw std::invalid_argument("ego_like_graph needs n >= 1");
    if (fanout < 1) throw std::invalid_argument("ego_like_graph needs fanout >= 1");
    const int cap = 1 + fanout + fanout * fanout;
    n = std::min(n, cap);

    Rng rng(derive_seed(seed, 0xe90));
    EgoGraph g(landmark_id);
    for (int i = 1; i < n; ++i) g.add_node(Node{landmark_id + "." + std::to_string(i), {}, {}});

    std::unordered_set<std::uint64_t> present;
    auto try_add = [&](std::int32_t src, std::int32_t dst) {
        if (src == dst) return false;
        if (!present.insert(edge_key(src, dst)).second) return false;
        g.add_edge(src, dst);
        return true;
    };

    // Attachment tree: first `fanout` nodes hang off the landmark, the
    // rest off random depth-1 nodes with spare fanout capacity.
    std::vector<int> depth1;
    std::vector<int> children;
    for (int v = 1; v < n; ++v) {
        if (static_cast<int>(depth1.size()) < fanout) {
            try_add(0, v);
            depth1.push_back(v);
            children.push_back(0);
            continue;
        }
        for (;;) {
            std::size_t pick = next_below(rng, depth1.size());
            if (children[pick] < fanout) {
                try_add(depth1[pick], v);
                ++children[pick];
                break;
            }
        }
    }

    if (n >= 2) {
        const std::int64_t max_edges = static_cast<std::int64_t>(n) * (n - 1) / 2;
        std::int64_t want = std::llround(target_avg_degree * n / 2.0);
        want = std::clamp<std::int64_t>(want, static_cast<std::int64_t>(g.edges.size()),
                                        max_edges);
        while (static_cast<std::int64_t>(g.edges.size()) < want) {
            auto a = static_cast<std::int32_t>(next_below(rng, n));
            auto b = static_cast<std::int32_t>(next_below(rng, n));
            try_add(a, b);
        }
    }
    return g;
}

EgoGraph k_regular_graph(int n, int k, std::uint64_t seed) {
    if (k < 1 || k >= n) throw std::invalid_argument("k_regular_graph needs 1 <= k < n");
    if ((static_cast<std::int64_t>(n) * k) % 2 != 0)
        throw std::invalid_argument("k_regular_graph needs n*k even");

    Rng rng(derive_seed(seed, 0x4e6));
    std::vector<std::int32_t> pool;
    pool.reserve(static_cast<std::size_t>(n) * k);
    for (std::int32_t v = 0; v < n; ++v)
        for (int j = 0; j < k; ++j) pool.push_back(v);

    std::vector<std::pair<std::int32_t, std::int32_t>> accepted;
    std::unordered_set<std::uint64_t> present;
    for (int round = 0; round < 2000 && !pool.empty(); ++round) {
        shuffle_vec(pool, rng);
        std::vector<std::int32_t> rest;
        for (std::size_t i = 0; i + 1 < pool.size(); i += 2) {
            std::int32_t a = pool[i], b = pool[i + 1];
            if (a == b || !present.insert(edge_key(a, b)).second) {
                rest.push_back(a);
                rest.push_back(b);
                continue;
            }
            accepted.emplace_back(a, b);
        }
        pool = std::move(rest);
        if (pool.empty()) break;
        // Free a few random accepted pairs so stuck stubs can re-pair.
        std::size_t release = std::min(accepted.size(), pool.size() / 2 + 2);
        for (std::size_t r = 0; r < release; ++r) {
            std::size_t idx = next_below(rng, accepted.size());
            auto [a, b] = accepted[idx];
            present.erase(edge_key(a, b));
            pool.push_back(a);
            pool.push_back(b);
            accepted[idx] = accepted.back();
            accepted.pop_back();
        }
    }
    if (!pool.empty()) throw std::runtime_error("k_regular_graph did not converge");

    EgoGraph g("r0");
    for (int v = 1; v < n; ++v) g.add_node(Node{"r" + std::to_string(v), {}, {}});
    for (auto [a, b] : accepted) g.add_edge(a, b);
    return g;
}

std::vector<int> bimodal_sizes(int count, std::uint64_t seed, int small_lo, int small_hi,
                               int large_mean, int large_sd, int max_size,
                               double large_fraction) {
    if (count < 0) throw std::invalid_argument("bimodal_sizes needs count >= 0");
    Rng rng(derive_seed(seed, 0xb1d));
    int large_count = static_cast<int>(std::lround(large_fraction * count));
    std::vector<int> sizes;
    sizes.reserve(count);
    for (int i = 0; i < count; ++i) {
        int size;
        if (i < large_count) {
            // Box-Muller around the large mode.
            double u1 = std::max(next_double(rng), 1e-12);
            double u2 = next_double(rng);
            double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
            size = static_cast<int>(std::lround(large_mean + large_sd * z));
        } else {
            size = small_lo + static_cast<int>(next_below(rng, small_hi - small_lo + 1));
        }
        sizes.push_back(std::clamp(size, 2, max_size));
    }
    shuffle_vec(sizes, rng);
    return sizes;
}

PopulationDataset make_topology_population(const SynthOptions& options) {
    PopulationDataset d;
    d.population = "SYNTH";
    std::vector<int> sizes = bimodal_sizes(options.graphs, derive_seed(options.seed, 1));
    for (int i = 0; i < options.graphs; ++i)
        d.graphs.push_back(ego_like_graph(sizes[i], options.target_avg_degree,
                                          derive_seed(options.seed, 2, i),
                                          "synth" + std::to_string(i)));
    return d;
}

PopulationDataset calibrated_topology_population(int graphs, SIParams params, double target_mu,
                                                 std::uint64_t seed) {
    if (params.p0 > target_mu)
        throw std::invalid_argument("target fraction below the initial infection rate");
    auto build = [&](double degree) {
        SynthOptions opt;
        opt.graphs = graphs;
        opt.target_avg_degree = degree;
        opt.seed = seed;
        return make_topology_population(opt);
    };
    double lo = 2.0, hi = 34.0;
    if (expected_banned_fraction(build(hi), params) < target_mu)
        throw std::invalid_argument("target fraction unreachable within the degree range");
    PopulationDataset best = build(lo);
    for (int it = 0; it < 24; ++it) {
        double mid = 0.5 * (lo + hi);
        PopulationDataset cand = build(mid);
        double mu = expected_banned_fraction(cand, params);
        if (std::abs(mu - target_mu) < 5e-5) return cand;
        if (mu < target_mu)
            lo = mid;
        else
            hi = mid;
        best = std::move(cand);
    }
    return best;
}

}  // namespace banscope
