// From-scratch random forest binary classifier: bootstrap per tree, random
// feature subsets at each split, greedy Gini splits, majority-vote
// prediction and out-of-bag error.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/common.hpp"
#include "core/rng.hpp"

namespace rfts::forest {

struct ForestConfig {
  int num_trees = 600;
  int min_node_size = 4;        // nodes smaller than this are never split
  int mtry = 0;                 // features tried per split; 0 = floor(sqrt(p)), min 1
  int max_depth = 0;            // 0 = unlimited
  double bootstrap_fraction = 1.0;  // bootstrap size as a fraction of n, with replacement

  void validate(std::size_t p) const;
  int resolved_mtry(std::size_t p) const;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left iff value <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t count0 = 0;  // in-bag class counts (leaves only)
  std::int32_t count1 = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<std::uint64_t> in_bag;  // bitset over training rows

  bool row_in_bag(std::size_t i) const {
    return (in_bag[i >> 6] >> (i & 63)) & 1ULL;
  }
  // 0/1 vote for a feature vector
  int predict(std::span<const double> z) const;
};

struct Forest {
  std::vector<Tree> trees;
  ForestConfig config;
  std::size_t p = 0;
  std::size_t n_rows = 0;
};

struct Vote {
  int label = 0;
  double fraction_one = 0.0;  // fraction of trees voting 1
};

struct OobResult {
  double error = 0.0;
  std::size_t evaluated = 0;  // observations with at least one excluding tree
  std::size_t skipped = 0;
};

// Train on pooled labeled data. Trees are built in parallel with per-tree
// derived streams, so the forest is identical for any jobs setting.
Forest fit(const LabeledDataset& data, const ForestConfig& config,
           numkit::RngStream rng, int jobs = 1);

// Majority vote over all trees; exact ties go to label 0.
Vote predict_vote(const Forest& forest, std::span<const double> z);

// Out-of-bag error on the training data: each row is voted on only by
// trees whose bootstrap excluded it. Rows covered by no tree are skipped.
OobResult oob_error(const Forest& forest, const LabeledDataset& data);

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // Gini impurity decrease of the node
};

// Best Gini split over candidate features for one node. `columns` holds the
// feature matrix column-major, `rows` the node's in-bag row indices (with
// multiplicity). Exposed for oracle tests against exhaustive search.
SplitChoice best_split(const std::vector<std::vector<double>>& columns,
                       std::span<const int> feature_ids,
                       std::span<const std::size_t> rows,
                       std::span<const std::uint8_t> labels);

}  // namespace detail

}  // namespace rfts::forest
