#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "deed/matrix.hpp"

namespace deed {

/// Depth-1 threshold rule: predicts `polarity` when x[feature_index] > threshold,
/// otherwise -polarity.
struct Stump {
  std::size_t feature_index = 0;
  double threshold = 0.0;
  int polarity = 1;

  int predict(std::span<const double> row) const {
    return row[feature_index] > threshold ? polarity : -polarity;
  }

  bool operator==(const Stump&) const = default;
};

/// Threshold used for the constant candidate that sits below every value.
inline constexpr double kBelowAllThreshold = std::numeric_limits<double>::lowest();

/// Weighted errors closer than this are treated as ties.
inline constexpr double kErrorTieTolerance = 1e-12;

struct StumpFit {
  Stump stump;
  /// Weighted 0-1 error, summed over misclassified rows in row order.
  double error = 0.0;
};

/// Per-column row order by ascending value; shared across boosting rounds.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& x);
  const std::vector<std::size_t>& order(std::size_t column) const { return order_[column]; }

 private:
  std::vector<std::vector<std::size_t>> order_;
};

/// Checks the shared preconditions of the weighted learners: non-empty,
/// matching lengths, labels in {-1,+1}, non-negative weights summing to 1.
void check_weighted_problem(const Matrix& x, const Labels& y, std::span<const double> w);

/// Minimum weighted-error stump over all midpoints of consecutive distinct
/// values plus a constant rule per feature, both polarities. Ties go to the
/// smaller feature index, then smaller threshold, then polarity +1.
StumpFit fit_stump(const Matrix& x, const Labels& y, std::span<const double> w);
StumpFit fit_stump(const Matrix& x, const Labels& y, std::span<const double> w, const SortedColumns& sorted);

/// Weighted error of an arbitrary prediction vector, summed in row order.
double weighted_error(const Labels& y, const Labels& predicted, std::span<const double> w);

}  // namespace deed
