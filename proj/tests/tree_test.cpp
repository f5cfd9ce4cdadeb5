#include "deed/tree.hpp"

#include <gtest/gtest.h>

#include "deed/error.hpp"
#include "deed/random.hpp"

namespace deed {
namespace {

std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

TEST(FitTree, DepthOneMatchesStumpPartition) {
  Matrix x(4, 1);
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i + 1);
  const Labels y{-1, -1, 1, 1};
  const DecisionTree tree = fit_tree(x, y, uniform(4), 1);
  const StumpFit stump = fit_stump(x, y, uniform(4));
  ASSERT_EQ(tree.nodes().size(), 3u);
  EXPECT_EQ(tree.nodes()[0].threshold, stump.stump.threshold);
  for (double v : {0.0, 1.0, 2.0, 2.5, 2.6, 3.0, 10.0}) {
    const std::vector<double> row{v};
    EXPECT_EQ(tree.predict(row), stump.stump.predict(row)) << v;
  }
}

TEST(FitTree, PureInputIsOneLeaf) {
  Matrix x(3, 2, 1.0);
  const DecisionTree tree = fit_tree(x, {-1, -1, -1}, uniform(3), 3);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_TRUE(tree.nodes()[0].is_leaf);
  EXPECT_EQ(tree.nodes()[0].leaf_class, -1);
}

TEST(FitTree, XorNeedsDepthTwo) {
  Matrix x(4, 2);
  const double pts[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = pts[i][0];
    x(i, 1) = pts[i][1];
  }
  const Labels y{-1, -1, 1, 1};
  auto accuracy = [&](const DecisionTree& tree) {
    int correct = 0;
    for (std::size_t i = 0; i < 4; ++i) correct += tree.predict(x.row(i)) == y[i];
    return correct / 4.0;
  };
  EXPECT_EQ(accuracy(fit_tree(x, y, uniform(4), 2)), 1.0);
  EXPECT_LT(accuracy(fit_tree(x, y, uniform(4), 1)), 1.0);
}

TEST(FitTree, TieLeafIsUnedited) {
  Matrix x(2, 1, 5.0);
  const DecisionTree tree = fit_tree(x, {1, -1}, uniform(2), 2);
  EXPECT_EQ(tree.predict(std::vector<double>{5.0}), -1);
}

TEST(FitTree, DepthIsBounded) {
  Rng rng(8);
  for (int depth = 1; depth <= 3; ++depth) {
    Matrix x(60, 3);
    Labels y(60);
    for (std::size_t i = 0; i < 60; ++i) {
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
      y[i] = rng.below(2) ? 1 : -1;
    }
    const DecisionTree tree = fit_tree(x, y, uniform(60), depth);
    EXPECT_LE(tree.depth(), static_cast<std::size_t>(depth));
    EXPECT_EQ(tree.leaf_count(), (tree.nodes().size() + 1) / 2);
  }
  EXPECT_THROW(fit_tree(Matrix(2, 1), {1, -1}, uniform(2), 4), ParameterError);
  EXPECT_THROW(fit_tree(Matrix(2, 1), {1, -1}, uniform(2), 0), ParameterError);
}

TEST(DecisionTree, RejectsMalformedNodes) {
  TreeNode split;
  split.is_leaf = false;
  split.left = 0;
  split.right = 1;
  EXPECT_THROW(DecisionTree({split, TreeNode{}}), ParameterError);
  TreeNode bad_leaf;
  bad_leaf.leaf_class = 0;
  EXPECT_THROW(DecisionTree({bad_leaf}), ParameterError);
}

}  // namespace
}  // namespace deed
