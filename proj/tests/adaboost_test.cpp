#include "deed/adaboost.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "deed/error.hpp"
#include "deed/random.hpp"

namespace deed {
namespace {

Matrix column(std::initializer_list<double> values) {
  Matrix x(values.size(), 1);
  std::size_t i = 0;
  for (double v : values) x(i++, 0) = v;
  return x;
}

double training_error(const AdaBoostModel& model, const Matrix& x, const Labels& y, std::size_t rounds) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const int h = model.score(x.row(i), rounds) > 0.0 ? 1 : -1;
    wrong += h != y[i];
  }
  return static_cast<double>(wrong) / static_cast<double>(x.rows());
}

TEST(LearnerWeight, ClosedForms) {
  EXPECT_NEAR(learner_weight(0.25), 0.5 * std::log(3.0), 1e-12);
  EXPECT_NEAR(learner_weight(0.0), 0.5 * std::log((1 - 1e-10) / 1e-10), 1e-9);
  EXPECT_NEAR(learner_weight(0.0), 11.5129, 1e-4);
}

TEST(FitAdaBoost, SeparableStopsAfterOneRound) {
  const Matrix x = column({1, 2, 3, 4});
  const Labels y{-1, -1, 1, 1};
  const AdaBoostModel model = fit_adaboost(x, y, {});
  ASSERT_EQ(model.learners.size(), 1u);
  EXPECT_NEAR(model.learners[0].alpha, 0.5 * std::log((1 - 1e-10) / 1e-10), 1e-6);
  const auto& stump = std::get<Stump>(model.learners[0].rule);
  EXPECT_EQ(stump.threshold, 2.5);
  EXPECT_EQ(predict(model, x), y);
}

TEST(FitAdaBoost, QuarterErrorRound) {
  // Best first stump misclassifies exactly one of four uniform-weight rows.
  const Matrix x = column({1, 2, 3, 4});
  const AdaBoostModel model = fit_adaboost(x, {1, -1, 1, -1}, {1, 1, 0});
  ASSERT_EQ(model.round_errors.size(), 1u);
  EXPECT_DOUBLE_EQ(model.round_errors[0], 0.25);
  EXPECT_NEAR(model.learners[0].alpha, 0.5 * std::log(3.0), 1e-12);
}

TEST(FitAdaBoost, Preconditions) {
  EXPECT_THROW(fit_adaboost(column({1}), {1}, {}), ParameterError);
  EXPECT_THROW(fit_adaboost(column({1, 2}), {1, 1}, {}), ParameterError);
  EXPECT_THROW(fit_adaboost(column({1, 2}), {1, -1}, {0, 1, 0}), ParameterError);
  EXPECT_THROW(fit_adaboost(column({1, 2}), {1, -1}, {5, 4, 0}), ParameterError);
}

TEST(FitAdaBoost, ChanceLearnerIsDiscarded) {
  // Identical inputs with opposite labels: every stump has error 0.5.
  const AdaBoostModel model = fit_adaboost(column({1, 1}), {1, -1}, {});
  EXPECT_TRUE(model.learners.empty());
  EXPECT_EQ(predict(model, column({0, 5})), (Labels{-1, -1}));
}

TEST(Predict, WeightedVote) {
  AdaBoostModel model;
  model.inputs.input_dim = 1;
  model.learners.push_back({Stump{0, kBelowAllThreshold, 1}, 1.0});
  model.learners.push_back({Stump{0, kBelowAllThreshold, -1}, 0.5});
  EXPECT_EQ(predict(model, column({3.0})), (Labels{1}));
  model.learners[1].alpha = 1.0;  // sum 0 -> unedited
  EXPECT_EQ(predict(model, column({3.0})), (Labels{-1}));
  EXPECT_THROW(predict(model, Matrix(1, 2)), ParameterError);
}

TEST(Predict, SingleStumpReproducesRule) {
  AdaBoostModel model;
  model.inputs.input_dim = 2;
  const Stump stump{1, 0.5, -1};
  model.learners.push_back({stump, 1.0});
  Rng rng(1);
  Matrix x(50, 2);
  for (std::size_t i = 0; i < 50; ++i) x(i, 0) = rng.normal(), x(i, 1) = rng.normal();
  const Labels labels = predict(model, x);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(labels[i], stump.predict(x.row(i)));
}

// Training error after each round never exceeds prod 2 sqrt(e_t (1 - e_t)).
TEST(FitAdaBoost, TrainingErrorBound) {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(63);
    const std::size_t d = 1 + rng.below(8);
    Matrix x(n, d);
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal();
      y[i] = i < 2 ? (i == 0 ? 1 : -1) : (x(i, 0) + 0.8 * rng.normal() > 0 ? 1 : -1);
    }
    for (int depth : {1, 2}) {
      const AdaBoostModel model = fit_adaboost(x, y, {30, depth, 0});
      for (std::size_t t = 1; t <= model.learners.size(); ++t) {
        ASSERT_LE(training_error(model, x, y, t), training_error_bound(model, t) + 1e-12)
            << "trial " << trial << " round " << t;
      }
    }
  }
}

// Rescaling one column by c > 0 changes thresholds, not predictions.
TEST(FitAdaBoost, ScaleInvariance) {
  Rng rng(5);
  Matrix x(80, 3);
  Labels y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = x(i, 0) - x(i, 2) + 0.5 * rng.normal() > 0 ? 1 : -1;
  }
  Matrix probe(100, 3);
  for (std::size_t i = 0; i < 100; ++i) {
    for (std::size_t j = 0; j < 3; ++j) probe(i, j) = rng.normal();
  }
  const Labels reference = predict(fit_adaboost(x, y, {25, 1, 0}), probe);
  for (double c : {0.5, 2.0, 3.0, 1e3}) {
    for (std::size_t col = 0; col < 3; ++col) {
      Matrix xs = x;
      Matrix ps = probe;
      for (std::size_t i = 0; i < xs.rows(); ++i) xs(i, col) *= c;
      for (std::size_t i = 0; i < ps.rows(); ++i) ps(i, col) *= c;
      EXPECT_EQ(predict(fit_adaboost(xs, y, {25, 1, 0}), ps), reference) << "c=" << c << " col=" << col;
    }
  }
}

TEST(FitAdaBoost, DeeperBaseLearnersFitXor) {
  Matrix x(4, 2);
  const double pts[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = pts[i][0], x(i, 1) = pts[i][1];
  const Labels y{-1, -1, 1, 1};
  EXPECT_EQ(predict(fit_adaboost(x, y, {10, 2, 0}), x), y);
}

}  // namespace
}  // namespace deed
