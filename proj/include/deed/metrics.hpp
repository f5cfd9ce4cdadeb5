#pragma once

#include <cstddef>

#include "deed/matrix.hpp"

namespace deed {

/// Binary confusion counts and scores; the positive class is edited (+1).
struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;

  std::size_t total() const { return tp + fp + fn + tn; }
  /// Specificity, TN / (TN + FP); 0 without negatives.
  double true_negative_rate() const;

  bool operator==(const Metrics&) const = default;
};

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

/// Throws ParameterError on empty input, length mismatch or labels outside {-1,+1}.
Metrics compute_metrics(const Labels& y_true, const Labels& y_pred);

}  // namespace deed
