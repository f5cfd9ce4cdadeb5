#include "deed/tree.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "deed/error.hpp"

namespace deed {

namespace {

// Weighted Gini impurity scaled by node weight: W * (1 - p^2 - q^2) = 2 * pos * neg / W.
double scaled_gini(double pos, double neg) {
  const double total = pos + neg;
  return total > 0.0 ? 2.0 * pos * neg / total : 0.0;
}

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Labels& y, std::span<const double> w, int max_depth,
              const SortedColumns& sorted)
      : x_(x), y_(y), w_(w), max_depth_(max_depth), sorted_(sorted), member_(x.rows(), 0) {}

  DecisionTree build() {
    std::vector<std::size_t> all(x_.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    grow(all, 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  std::size_t grow(const std::vector<std::size_t>& rows, int depth) {
    const std::size_t index = nodes_.size();
    nodes_.emplace_back();

    double pos = 0.0;
    double neg = 0.0;
    for (std::size_t i : rows) (y_[i] > 0 ? pos : neg) += w_[i];
    const int majority = pos > neg ? 1 : -1;

    if (depth >= max_depth_ || pos == 0.0 || neg == 0.0) {
      nodes_[index] = leaf(majority);
      return index;
    }
    const double parent = scaled_gini(pos, neg);
    const SplitChoice split = best_split(rows, pos, neg);
    // Zero-gain splits are allowed: XOR-like structure only pays off one level down.
    if (!(split.impurity <= parent + 1e-15)) {
      nodes_[index] = leaf(majority);
      return index;
    }

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t i : rows) (x_(i, split.feature) <= split.threshold ? left_rows : right_rows).push_back(i);

    const std::size_t left = grow(left_rows, depth + 1);
    const std::size_t right = grow(right_rows, depth + 1);
    TreeNode& node = nodes_[index];
    node.is_leaf = false;
    node.feature_index = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return index;
  }

  static TreeNode leaf(int cls) {
    TreeNode node;
    node.is_leaf = true;
    node.leaf_class = cls;
    return node;
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows, double pos_total, double neg_total) {
    for (std::size_t i : rows) member_[i] = 1;
    SplitChoice best;
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      double left_pos = 0.0;
      double left_neg = 0.0;
      std::size_t prev = 0;
      bool have_prev = false;
      for (std::size_t i : sorted_.order(f)) {
        if (!member_[i]) continue;
        if (have_prev && x_(i, f) != x_(prev, f)) {
          const double impurity =
              scaled_gini(left_pos, left_neg) + scaled_gini(pos_total - left_pos, neg_total - left_neg);
          if (impurity < best.impurity - 1e-15) {
            const double here = x_(prev, f);
            best = SplitChoice{f, here + (x_(i, f) - here) / 2.0, impurity};
          }
        }
        (y_[i] > 0 ? left_pos : left_neg) += w_[i];
        prev = i;
        have_prev = true;
      }
    }
    for (std::size_t i : rows) member_[i] = 0;
    return best;
  }

  const Matrix& x_;
  const Labels& y_;
  std::span<const double> w_;
  int max_depth_;
  const SortedColumns& sorted_;
  std::vector<char> member_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ParameterError("a tree needs at least one node");
  // Children must point forward, which also rules out cycles.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf) {
      if (n.leaf_class != 1 && n.leaf_class != -1) throw ParameterError("leaf class must be +1 or -1");
    } else if (n.left <= i || n.right <= i || n.left >= nodes_.size() || n.right >= nodes_.size()) {
      throw ParameterError("malformed tree: bad child index");
    }
  }
}

int DecisionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf) {
    const auto& n = nodes_[i];
    i = row[n.feature_index] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].leaf_class;
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(std::size_t)> visit = [&](std::size_t i) -> std::size_t {
    if (nodes_[i].is_leaf) return 0;
    return 1 + std::max(visit(nodes_[i].left), visit(nodes_[i].right));
  };
  return visit(0);
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

DecisionTree fit_tree(const Matrix& x, const Labels& y, std::span<const double> w, int max_depth) {
  check_weighted_problem(x, y, w);
  return fit_tree(x, y, w, max_depth, SortedColumns(x));
}

DecisionTree fit_tree(const Matrix& x, const Labels& y, std::span<const double> w, int max_depth,
                      const SortedColumns& sorted) {
  if (max_depth < 1 || max_depth > kMaxTreeDepth) throw ParameterError("tree depth must be in 1..3");
  if (x.rows() == 0) throw ParameterError("empty training data");
  return TreeBuilder(x, y, w, max_depth, sorted).build();
}

}  // namespace deed
