#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "deed/matrix.hpp"
#include "deed/stump.hpp"

namespace deed {

/// A node of a binary classification tree. Split nodes send rows with
/// x[feature_index] <= threshold to `left`.
struct TreeNode {
  bool is_leaf = true;
  int leaf_class = -1;
  std::size_t feature_index = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;

  bool operator==(const TreeNode&) const = default;
};

/// Nodes stored flat; index 0 is the root.
class DecisionTree {
 public:
  DecisionTree() : nodes_{TreeNode{}} {}
  explicit DecisionTree(std::vector<TreeNode> nodes);

  int predict(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

inline constexpr int kMaxTreeDepth = 3;

/// Greedy top-down CART on weighted Gini impurity. A node becomes a leaf at
/// max_depth, when pure, or when no split would leave impurity unchanged or
/// lower (in practice: when every feature is constant in the node). Leaves
/// take the weighted majority class, ties going to -1.
DecisionTree fit_tree(const Matrix& x, const Labels& y, std::span<const double> w, int max_depth);
DecisionTree fit_tree(const Matrix& x, const Labels& y, std::span<const double> w, int max_depth,
                      const SortedColumns& sorted);

}  // namespace deed
