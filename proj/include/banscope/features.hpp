#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "banscope/graph.hpp"

namespace banscope {

struct LabeledSample {
    std::vector<double> x;  // ordered per SampleMatrix::feature_names
    bool banned = false;
};

struct SampleMatrix {
    std::vector<std::string> feature_names;
    std::vector<LabeledSample> rows;

    std::size_t positives() const;
};

/// Labeled samples from the unique users of a dataset that carry the
/// complete canonical feature set; everyone else is dropped.
SampleMatrix samples_from_dataset(const PopulationDataset& d);

/// Equal class counts by uniform downsampling of the majority class.
SampleMatrix balance(const SampleMatrix& samples, std::uint64_t seed);

/// Stratified shuffle split; class balance is preserved within one
/// sample on each side.
std::pair<SampleMatrix, SampleMatrix> train_test_split(const SampleMatrix& samples,
                                                       double train_fraction,
                                                       std::uint64_t seed);

enum class MaxFeaturesRule { all, sqrt_rule, log2_rule };

MaxFeaturesRule max_features_rule_from(const std::string& name);

struct TreeParams {
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    MaxFeaturesRule max_features = MaxFeaturesRule::all;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::int64_t count[2] = {0, 0};  // class counts at fit time
    double p_banned = 0.0;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<std::string> feature_names;
    TreeParams params;
};

/// Greedy CART growth under Gini impurity. Thresholds sit at midpoints
/// of consecutive distinct values; gain ties break by feature order,
/// then lower threshold. Deterministic given the seed (which only
/// matters for the sqrt/log2 feature subsampling rules).
TreeModel fit_tree(const SampleMatrix& train, TreeParams params, std::uint64_t seed);

bool predict(const TreeModel& model, std::span<const double> x);
double predict_proba(const TreeModel& model, std::span<const double> x);
double accuracy(const TreeModel& model, const SampleMatrix& samples);

/// Impurity-decrease importance per feature, non-negative, summing to 1
/// (all zeros for a stump-less tree).
std::vector<double> impurity_importance(const TreeModel& model);

/// Mean accuracy drop over `repeats` column shuffles, clamped at 0 and
/// normalized to sum 1 when any drop is positive.
std::vector<double> permutation_importance(const TreeModel& model, const SampleMatrix& samples,
                                           std::uint64_t seed, int repeats = 5);

std::string model_to_json(const TreeModel& model);
TreeModel model_from_json(const std::string& text);

}  // namespace banscope
