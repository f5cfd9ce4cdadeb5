#include "deed/adaboost.hpp"

#include <algorithm>
#include <cmath>

#include "deed/error.hpp"

namespace deed {

namespace {

double clamp_error(double e) { return std::clamp(e, kEpsilonClamp, 1.0 - kEpsilonClamp); }

void check_dims(const ModelInputs& inputs, const Matrix& x) {
  if (x.cols() != inputs.input_dim) {
    throw ParameterError("input has " + std::to_string(x.cols()) + " columns, model expects " +
                         std::to_string(inputs.input_dim));
  }
}

}  // namespace

double learner_weight(double weighted_error) {
  const double e = clamp_error(weighted_error);
  return 0.5 * std::log((1.0 - e) / e);
}

double AdaBoostModel::score(std::span<const double> row, std::size_t n_learners) const {
  double total = 0.0;
  n_learners = std::min(n_learners, learners.size());
  for (std::size_t t = 0; t < n_learners; ++t) total += learners[t].alpha * learners[t].predict(row);
  return total;
}

AdaBoostModel fit_adaboost(const Matrix& x, const Labels& y, const AdaBoostConfig& config) {
  if (config.rounds < 1) throw ParameterError("rounds must be positive");
  if (config.base_depth < 1 || config.base_depth > kMaxTreeDepth) {
    throw ParameterError("base_depth must be in 1..3");
  }
  const std::size_t n = x.rows();
  if (n < 2) throw ParameterError("AdaBoost needs at least two rows");
  if (y.size() != n) throw ParameterError("X and y lengths differ");
  const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
  if (!has_pos || !has_neg) throw ParameterError("AdaBoost needs both classes in the training data");

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  check_weighted_problem(x, y, w);
  const SortedColumns sorted(x);

  AdaBoostModel model;
  model.config = config;
  model.inputs.input_dim = x.cols();

  Labels h(n);
  for (int round = 0; round < config.rounds; ++round) {
    WeakLearner learner;
    double error = 0.0;
    if (config.base_depth == 1) {
      const StumpFit fit = fit_stump(x, y, w, sorted);
      learner.rule = fit.stump;
      error = fit.error;
      for (std::size_t i = 0; i < n; ++i) h[i] = fit.stump.predict(x.row(i));
    } else {
      DecisionTree tree = fit_tree(x, y, w, config.base_depth, sorted);
      for (std::size_t i = 0; i < n; ++i) h[i] = tree.predict(x.row(i));
      error = weighted_error(y, h, w);
      learner.rule = std::move(tree);
    }

    if (error >= 0.5 - 1e-12) break;
    learner.alpha = learner_weight(error);
    model.learners.push_back(std::move(learner));
    model.round_errors.push_back(error);
    if (error < kEpsilonClamp) break;

    const double alpha = model.learners.back().alpha;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(-alpha * y[i] * h[i]);
      total += w[i];
    }
    for (auto& wi : w) wi /= total;
  }
  return model;
}

Labels predict(const AdaBoostModel& model, const Matrix& x) {
  check_dims(model.inputs, x);
  Labels out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.score(x.row(i)) > 0.0 ? 1 : -1;
  return out;
}

double training_error_bound(const AdaBoostModel& model, std::size_t rounds) {
  double bound = 1.0;
  rounds = std::min(rounds, model.round_errors.size());
  for (std::size_t t = 0; t < rounds; ++t) {
    const double e = clamp_error(model.round_errors[t]);
    bound *= 2.0 * std::sqrt(e * (1.0 - e));
  }
  return bound;
}

}  // namespace deed
