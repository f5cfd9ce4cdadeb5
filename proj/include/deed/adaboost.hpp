#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "deed/feature_store.hpp"
#include "deed/matrix.hpp"
#include "deed/stump.hpp"
#include "deed/tree.hpp"

namespace deed {

/// What a fitted model was trained on, so it can rebuild its input vectors.
struct ModelInputs {
  FeatureMode feature_mode = FeatureMode::kHsPd;
  std::optional<std::uint32_t> truncate_k;
  std::size_t input_dim = 0;
  /// Header of the training set (record_count = training rows).
  FeatureSetHeader provenance;

  bool operator==(const ModelInputs&) const = default;
};

struct AdaBoostConfig {
  int rounds = 50;
  int base_depth = 1;
  /// Recorded for provenance; fitting itself is deterministic.
  std::uint64_t seed = 0;

  bool operator==(const AdaBoostConfig&) const = default;
};

using BaseLearner = std::variant<Stump, DecisionTree>;

struct WeakLearner {
  BaseLearner rule;
  double alpha = 0.0;

  int predict(std::span<const double> row) const {
    return std::visit([&](const auto& r) { return r.predict(row); }, rule);
  }
  bool operator==(const WeakLearner&) const = default;
};

/// Discrete AdaBoost ensemble; decision is sign(sum alpha_t h_t(x)) with 0 -> -1.
struct AdaBoostModel {
  std::vector<WeakLearner> learners;
  /// Weighted error of each kept learner when it was fitted.
  std::vector<double> round_errors;
  AdaBoostConfig config;
  ModelInputs inputs;

  double score(std::span<const double> row) const { return score(row, learners.size()); }
  /// Score of the first `n_learners` learners only.
  double score(std::span<const double> row, std::size_t n_learners) const;

  bool operator==(const AdaBoostModel&) const = default;
};

/// Errors are clamped to [kEpsilonClamp, 1 - kEpsilonClamp] before computing alpha.
inline constexpr double kEpsilonClamp = 1e-10;

/// 0.5 * ln((1 - e) / e) on the clamped error.
double learner_weight(double weighted_error);

/// Discrete AdaBoost. Stops early when a learner is no better than chance
/// (that learner is discarded) or perfect (that learner is kept).
AdaBoostModel fit_adaboost(const Matrix& x, const Labels& y, const AdaBoostConfig& config);

Labels predict(const AdaBoostModel& model, const Matrix& x);

/// Product of 2*sqrt(e_t(1-e_t)) over the first `rounds` learners, using the
/// clamped errors. Upper-bounds training error after that many rounds.
double training_error_bound(const AdaBoostModel& model, std::size_t rounds);

}  // namespace deed
