#include "banscope/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "banscope/ingest.hpp"
#include "banscope/rng.hpp"
#include "json.hpp"

namespace banscope {

using nlohmann::json;

std::size_t SampleMatrix::positives() const {
    std::size_t n = 0;
    for (const auto& r : rows)
        if (r.banned) ++n;
    return n;
}

SampleMatrix samples_from_dataset(const PopulationDataset& d) {
    SampleMatrix m;
    m.feature_names = canonical_feature_names();
    std::unordered_set<std::string> seen;
    for (const auto& g : d.graphs) {
        for (const auto& node : g.nodes) {
            if (!node.features || !seen.insert(node.id).second) continue;
            LabeledSample row;
            row.banned = node.bans.banned();
            row.x.reserve(m.feature_names.size());
            bool complete = true;
            for (const auto& name : m.feature_names) {
                auto it = node.features->find(name);
                if (it == node.features->end()) {
                    complete = false;
                    break;
                }
                row.x.push_back(it->second);
            }
            if (complete) m.rows.push_back(std::move(row));
        }
    }
    return m;
}

SampleMatrix balance(const SampleMatrix& samples, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < samples.rows.size(); ++i)
        (samples.rows[i].banned ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw std::invalid_argument("balance needs both classes present");

    Rng rng(derive_seed(seed, 0xba1a));
    auto& majority = pos.size() > neg.size() ? pos : neg;
    std::size_t keep = std::min(pos.size(), neg.size());
    // Partial Fisher-Yates: the first `keep` entries are a uniform draw.
    for (std::size_t i = 0; i < keep; ++i)
        std::swap(majority[i], majority[i + next_below(rng, majority.size() - i)]);
    majority.resize(keep);

    std::vector<std::size_t> picked;
    picked.insert(picked.end(), pos.begin(), pos.end());
    picked.insert(picked.end(), neg.begin(), neg.end());
    std::sort(picked.begin(), picked.end());  // keep input order

    SampleMatrix out;
    out.feature_names = samples.feature_names;
    out.rows.reserve(picked.size());
    for (std::size_t i : picked) out.rows.push_back(samples.rows[i]);
    return out;
}

std::pair<SampleMatrix, SampleMatrix> train_test_split(const SampleMatrix& samples,
                                                       double train_fraction,
                                                       std::uint64_t seed) {
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
        throw std::invalid_argument("train_fraction must lie in [0,1]");
    Rng rng(derive_seed(seed, 0x5b117));
    SampleMatrix train, test;
    train.feature_names = samples.feature_names;
    test.feature_names = samples.feature_names;

    // Shuffle within each class, then cut each at the fraction.
    for (bool cls : {false, true}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < samples.rows.size(); ++i)
            if (samples.rows[i].banned == cls) idx.push_back(i);
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[next_below(rng, i)]);
        std::size_t cut = static_cast<std::size_t>(std::llround(train_fraction * idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < cut ? train : test).rows.push_back(samples.rows[idx[i]]);
    }
    return {std::move(train), std::move(test)};
}

MaxFeaturesRule max_features_rule_from(const std::string& name) {
    if (name == "all") return MaxFeaturesRule::all;
    if (name == "sqrt") return MaxFeaturesRule::sqrt_rule;
    if (name == "log2") return MaxFeaturesRule::log2_rule;
    throw std::invalid_argument("unknown max-features rule: " + name);
}

namespace {

double gini(std::int64_t c0, std::int64_t c1) {
    double n = static_cast<double>(c0 + c1);
    if (n == 0) return 0.0;
    double p0 = c0 / n, p1 = c1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct Builder {
    const SampleMatrix& data;
    TreeParams params;
    Rng rng;
    std::vector<TreeNode> nodes;

    int feature_budget() const {
        int f = static_cast<int>(data.feature_names.size());
        switch (params.max_features) {
            case MaxFeaturesRule::all: return f;
            case MaxFeaturesRule::sqrt_rule:
                return std::max(1, static_cast<int>(std::sqrt(static_cast<double>(f))));
            case MaxFeaturesRule::log2_rule:
                return std::max(1, static_cast<int>(std::log2(static_cast<double>(f))));
        }
        return f;
    }

    // Candidate features for one node: either all of them, or a uniform
    // draw without replacement, kept in index order for tie stability.
    std::vector<int> candidate_features() {
        int f = static_cast<int>(data.feature_names.size());
        int budget = feature_budget();
        if (budget >= f) {
            std::vector<int> all(f);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        std::vector<int> pool(f);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < budget; ++i)
            std::swap(pool[i], pool[i + next_below(rng, pool.size() - i)]);
        pool.resize(budget);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    Split best_split(const std::vector<std::size_t>& rows, std::int64_t c0, std::int64_t c1) {
        Split best;
        const double parent = gini(c0, c1);
        const double total = static_cast<double>(rows.size());
        std::vector<std::pair<double, bool>> column(rows.size());
        for (int feature : candidate_features()) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& r = data.rows[rows[i]];
                column[i] = {r.x[feature], r.banned};
            }
            std::sort(column.begin(), column.end());
            std::int64_t l0 = 0, l1 = 0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                (column[i].second ? l1 : l0)++;
                if (column[i].first == column[i + 1].first) continue;
                std::int64_t left = l0 + l1;
                std::int64_t right = static_cast<std::int64_t>(column.size()) - left;
                if (left < params.min_samples_leaf || right < params.min_samples_leaf) continue;
                double weighted = (left / total) * gini(l0, l1) +
                                  (right / total) * gini(c0 - l0, c1 - l1);
                double gain = parent - weighted;
                if (gain > best.gain + 1e-12) {
                    best.feature = feature;
                    best.threshold = std::midpoint(column[i].first, column[i + 1].first);
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int grow(std::vector<std::size_t> rows) {
        std::int64_t c1 = 0;
        for (std::size_t i : rows) c1 += data.rows[i].banned ? 1 : 0;
        std::int64_t c0 = static_cast<std::int64_t>(rows.size()) - c1;

        int self = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[self].count[0] = c0;
        nodes[self].count[1] = c1;
        nodes[self].p_banned = rows.empty() ? 0.0 : static_cast<double>(c1) / rows.size();

        bool splittable = c0 != 0 && c1 != 0 &&
                          static_cast<std::int64_t>(rows.size()) >= params.min_samples_split;
        if (!splittable) return self;
        Split split = best_split(rows, c0, c1);
        if (split.feature < 0) return self;

        std::vector<std::size_t> left, right;
        for (std::size_t i : rows)
            (data.rows[i].x[split.feature] <= split.threshold ? left : right).push_back(i);
        rows.clear();
        rows.shrink_to_fit();

        nodes[self].feature = split.feature;
        nodes[self].threshold = split.threshold;
        int l = grow(std::move(left));
        nodes[self].left = l;
        int r = grow(std::move(right));
        nodes[self].right = r;
        return self;
    }
};

}  // namespace

TreeModel fit_tree(const SampleMatrix& train, TreeParams params, std::uint64_t seed) {
    if (train.rows.empty()) throw std::invalid_argument("fit_tree on empty training set");
    if (params.min_samples_leaf < 1 || params.min_samples_split < 2)
        throw std::invalid_argument("tree params out of range");
    Builder b{train, params, Rng(derive_seed(seed, 0x7ee)), {}};
    std::vector<std::size_t> all(train.rows.size());
    std::iota(all.begin(), all.end(), 0);
    b.grow(std::move(all));
    TreeModel model;
    model.nodes = std::move(b.nodes);
    model.feature_names = train.feature_names;
    model.params = params;
    return model;
}

double predict_proba(const TreeModel& model, std::span<const double> x) {
    if (model.nodes.empty()) throw std::invalid_argument("empty model");
    int at = 0;
    for (;;) {
        const TreeNode& n = model.nodes[at];
        if (n.feature < 0) return n.p_banned;
        at = x[n.feature] <= n.threshold ? n.left : n.right;
    }
}

bool predict(const TreeModel& model, std::span<const double> x) {
    return predict_proba(model, x) > 0.5;
}

double accuracy(const TreeModel& model, const SampleMatrix& samples) {
    if (samples.rows.empty()) throw std::invalid_argument("accuracy on empty sample set");
    std::size_t hits = 0;
    for (const auto& r : samples.rows)
        if (predict(model, r.x) == r.banned) ++hits;
    return static_cast<double>(hits) / samples.rows.size();
}

std::vector<double> impurity_importance(const TreeModel& model) {
    std::vector<double> raw(model.feature_names.size(), 0.0);
    if (model.nodes.empty()) return raw;
    const double total = static_cast<double>(model.nodes[0].count[0] + model.nodes[0].count[1]);
    for (const auto& n : model.nodes) {
        if (n.feature < 0) continue;
        const TreeNode& l = model.nodes[n.left];
        const TreeNode& r = model.nodes[n.right];
        double nw = (n.count[0] + n.count[1]) / total;
        double lw = (l.count[0] + l.count[1]) / total;
        double rw = (r.count[0] + r.count[1]) / total;
        raw[n.feature] += nw * gini(n.count[0], n.count[1]) - lw * gini(l.count[0], l.count[1]) -
                          rw * gini(r.count[0], r.count[1]);
    }
    double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (sum > 0)
        for (double& v : raw) v /= sum;
    return raw;
}

std::vector<double> permutation_importance(const TreeModel& model, const SampleMatrix& samples,
                                           std::uint64_t seed, int repeats) {
    if (samples.rows.empty()) throw std::invalid_argument("permutation importance needs samples");
    const double base = accuracy(model, samples);
    std::vector<double> drops(model.feature_names.size(), 0.0);
    SampleMatrix shuffled = samples;
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
        double drop = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            Rng rng(derive_seed(seed, f, rep));
            std::vector<double> column(samples.rows.size());
            for (std::size_t i = 0; i < samples.rows.size(); ++i) column[i] = samples.rows[i].x[f];
            for (std::size_t i = column.size(); i > 1; --i)
                std::swap(column[i - 1], column[next_below(rng, i)]);
            for (std::size_t i = 0; i < samples.rows.size(); ++i) shuffled.rows[i].x[f] = column[i];
            drop += base - accuracy(model, shuffled);
            for (std::size_t i = 0; i < samples.rows.size(); ++i)
                shuffled.rows[i].x[f] = samples.rows[i].x[f];
        }
        drops[f] = std::max(0.0, drop / repeats);
    }
    double sum = std::accumulate(drops.begin(), drops.end(), 0.0);
    if (sum > 0)
        for (double& v : drops) v /= sum;
    return drops;
}

namespace {

const char* rule_name(MaxFeaturesRule r) {
    switch (r) {
        case MaxFeaturesRule::all: return "all";
        case MaxFeaturesRule::sqrt_rule: return "sqrt";
        case MaxFeaturesRule::log2_rule: return "log2";
    }
    return "all";
}

}  // namespace

namespace {

json node_to_json(const TreeModel& model, int at) {
    const TreeNode& n = model.nodes[at];
    json nj{{"count", {n.count[0], n.count[1]}}, {"p_banned", n.p_banned}};
    if (n.feature >= 0) {
        nj["feature"] = model.feature_names[n.feature];
        nj["threshold"] = n.threshold;
        nj["left"] = node_to_json(model, n.left);
        nj["right"] = node_to_json(model, n.right);
    }
    return nj;
}

int node_from_json(const json& nj, TreeModel& model) {
    int self = static_cast<int>(model.nodes.size());
    model.nodes.emplace_back();
    model.nodes[self].count[0] = nj.at("count")[0].get<std::int64_t>();
    model.nodes[self].count[1] = nj.at("count")[1].get<std::int64_t>();
    model.nodes[self].p_banned = nj.value("p_banned", 0.0);
    if (nj.contains("feature")) {
        auto it = std::find(model.feature_names.begin(), model.feature_names.end(),
                            nj["feature"].get<std::string>());
        if (it == model.feature_names.end())
            throw std::invalid_argument("model references unknown feature");
        model.nodes[self].feature = static_cast<int>(it - model.feature_names.begin());
        model.nodes[self].threshold = nj.at("threshold").get<double>();
        int l = node_from_json(nj.at("left"), model);
        model.nodes[self].left = l;
        int r = node_from_json(nj.at("right"), model);
        model.nodes[self].right = r;
    }
    return self;
}

}  // namespace

std::string model_to_json(const TreeModel& model) {
    if (model.nodes.empty()) throw std::invalid_argument("empty model");
    json j{{"feature_names", model.feature_names},
           {"params",
            {{"min_samples_split", model.params.min_samples_split},
             {"min_samples_leaf", model.params.min_samples_leaf},
             {"max_features", rule_name(model.params.max_features)}}},
           {"root", node_to_json(model, 0)}};
    return j.dump(2);
}

TreeModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    TreeModel model;
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.params.min_samples_split = j["params"].value("min_samples_split", 2);
    model.params.min_samples_leaf = j["params"].value("min_samples_leaf", 1);
    model.params.max_features = max_features_rule_from(j["params"].value("max_features", "all"));
    node_from_json(j.at("root"), model);
    return model;
}

}  // namespace banscope
