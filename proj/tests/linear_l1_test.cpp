#include "deed/linear_l1.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "deed/error.hpp"
#include "deed/random.hpp"

namespace deed {
namespace {

struct Problem {
  Matrix x;
  Labels y;
};

Problem random_problem(std::uint64_t seed, std::size_t n, std::size_t d, double signal) {
  Rng rng(seed);
  Problem p{Matrix(n, d), Labels(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0;
    for (std::size_t j = 0; j < d; ++j) {
      p.x(i, j) = 3.0 * rng.normal() + static_cast<double>(j);
      z += (j % 2 ? -signal : signal) * p.x(i, j) / 3.0;
    }
    p.y[i] = z + rng.normal() > 0 ? 1 : -1;
  }
  p.y[0] = 1;
  p.y[1] = -1;
  return p;
}

TEST(SoftThreshold, Cases) {
  EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
  EXPECT_EQ(soft_threshold(0.5, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-1.0, 1.0), 0.0);
}

TEST(LinearL1, ObjectiveAtOriginIsLog2) {
  const Problem p = random_problem(1, 30, 4, 1.0);
  const std::vector<double> zero(4, 0.0);
  EXPECT_NEAR(l1_logistic_objective(p.x, p.y, zero, 0.0, 0.7), std::log(2.0), 1e-15);
  const LinearL1Model model = fit_linear_l1(p.x, p.y, {0.1, 1000, 1e-6});
  EXPECT_NEAR(model.objective_history.front(), std::log(2.0), 1e-15);
}

TEST(LinearL1, HugePenaltyZeroesWeights) {
  Problem p = random_problem(2, 40, 5, 1.0);
  for (std::size_t i = 0; i < 40; ++i) p.y[i] = i % 2 ? 1 : -1;
  const LinearL1Model balanced = fit_linear_l1(p.x, p.y, {1e6, 1000, 1e-6});
  for (double w : balanced.weights) EXPECT_EQ(w, 0.0);
  EXPECT_NEAR(balanced.bias, 0.0, 1e-12);
  EXPECT_EQ(predict(balanced, p.x), Labels(40, -1));

  // 30 positives, 10 negatives: bias-only optimum is log(3).
  for (std::size_t i = 0; i < 40; ++i) p.y[i] = i < 30 ? 1 : -1;
  const LinearL1Model skewed = fit_linear_l1(p.x, p.y, {1e6, 20000, 1e-14});
  for (double w : skewed.weights) EXPECT_EQ(w, 0.0);
  EXPECT_NEAR(skewed.bias, std::log(3.0), 1e-4);
}

TEST(LinearL1, UnpenalisedSeparable1D) {
  Matrix x(10, 1);
  Labels y(10);
  for (std::size_t i = 0; i < 10; ++i) {
    x(i, 0) = static_cast<double>(i);
    y[i] = i >= 5 ? 1 : -1;
  }
  const LinearL1Model model = fit_linear_l1(x, y, {0.0, 1000, 1e-6});
  EXPECT_EQ(predict(model, x), y);
  EXPECT_GT(model.weights[0], 0.0);
}

TEST(LinearL1, ObjectiveNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Problem p = random_problem(seed, 60, 6, 0.7);
    for (double lambda : {0.0, 0.01, 0.1}) {
      const LinearL1Model model = fit_linear_l1(p.x, p.y, {lambda, 500, 1e-9});
      for (std::size_t k = 1; k < model.objective_history.size(); ++k) {
        ASSERT_LE(model.objective_history[k], model.objective_history[k - 1]);
      }
      const Matrix xs = standardize(model, p.x);
      EXPECT_NEAR(l1_logistic_objective(xs, p.y, model.weights, model.bias, lambda),
                  model.objective_history.back(), 1e-12);
    }
  }
}

// One proximal step from w = 0 has the closed form
//   w_j = -step * sign(g_j) * max(|g_j| - lambda, 0),
// where g = (1/n) sum_i -y_i x_i / 2 is the loss gradient at the origin.
TEST(LinearL1, FirstProximalStepClosedForm) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 100);
    const std::size_t n = 5 + rng.below(20);
    const std::size_t d = 1 + rng.below(5);
    Problem p = random_problem(seed, n, d, 1.0);
    const double lambda = 0.05 * rng.uniform();
    const LinearL1Model model = fit_linear_l1(p.x, p.y, {lambda, 1, 0.0});
    ASSERT_EQ(model.objective_history.size(), 2u);
    const Matrix xs = standardize(model, p.x);
    const double step = static_cast<double>(n) / (0.25 * [&] {
      double f = 0;
      for (double v : xs.data()) f += v * v;
      return f;
    }() + static_cast<double>(n));
    EXPECT_NEAR(proximal_step(xs), step, 1e-15);
    double g_b = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) g += -p.y[i] * xs(i, j) * 0.5;
      g /= static_cast<double>(n);
      const double expected = -step * (g > 0 ? 1.0 : -1.0) * std::max(std::abs(g) - lambda, 0.0);
      EXPECT_NEAR(model.weights[j], expected, 1e-12) << "seed " << seed;
    }
    for (std::size_t i = 0; i < n; ++i) g_b += -p.y[i] * 0.5;
    EXPECT_NEAR(model.bias, -step * g_b / static_cast<double>(n), 1e-12);
  }
}

TEST(LinearL1, ConstantFeatureIsDropped) {
  Problem p = random_problem(4, 50, 3, 1.0);
  for (std::size_t i = 0; i < 50; ++i) p.x(i, 1) = 7.0;
  const LinearL1Model model = fit_linear_l1(p.x, p.y, {0.0, 300, 1e-9});
  EXPECT_EQ(model.stds[1], 0.0);
  EXPECT_EQ(model.weights[1], 0.0);
  for (double w : model.weights) EXPECT_TRUE(std::isfinite(w));
}

TEST(LinearL1, ZeroModelPredictsUnedited) {
  LinearL1Model model;
  model.weights = {0.0, 0.0};
  model.means = {0.0, 0.0};
  model.stds = {1.0, 1.0};
  model.inputs.input_dim = 2;
  EXPECT_EQ(predict(model, Matrix(3, 2, 4.0)), Labels(3, -1));
  EXPECT_THROW(predict(model, Matrix(3, 3)), ParameterError);
}

TEST(LinearL1, Preconditions) {
  Problem p = random_problem(4, 10, 2, 1.0);
  Labels single(10, 1);
  EXPECT_THROW(fit_linear_l1(p.x, single, {}), ParameterError);
  EXPECT_THROW(fit_linear_l1(p.x, p.y, {-1.0, 10, 1e-6}), ParameterError);
  EXPECT_THROW(fit_linear_l1(Matrix(), {}, {}), ParameterError);
}

}  // namespace
}  // namespace deed
