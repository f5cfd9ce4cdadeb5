#include "deed/stump.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "deed/error.hpp"

namespace deed {

namespace {

struct Candidate {
  std::size_t feature;
  double threshold;
  int polarity;
  double error;
};

/// Walks every candidate of every feature in tie-break order.
template <typename Visit>
void for_each_candidate(const Matrix& x, const Labels& y, std::span<const double> w,
                        const SortedColumns& sorted, Visit&& visit) {
  double pos_total = 0.0;
  double neg_total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0 ? pos_total : neg_total) += w[i];

  for (std::size_t f = 0; f < x.cols(); ++f) {
    // Constant rule: everything lies right of the threshold.
    visit(Candidate{f, kBelowAllThreshold, 1, neg_total});
    visit(Candidate{f, kBelowAllThreshold, -1, pos_total});

    const auto& order = sorted.order(f);
    double left_pos = 0.0;
    double left_neg = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const std::size_t i = order[k];
      (y[i] > 0 ? left_pos : left_neg) += w[i];
      const double here = x(i, f);
      const double next = x(order[k + 1], f);
      if (next == here) continue;
      const double threshold = here + (next - here) / 2.0;
      // Polarity +1 predicts -1 on the left, +1 on the right.
      visit(Candidate{f, threshold, 1, left_pos + (neg_total - left_neg)});
      visit(Candidate{f, threshold, -1, left_neg + (pos_total - left_pos)});
    }
  }
}

}  // namespace

SortedColumns::SortedColumns(const Matrix& x) : order_(x.cols()) {
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& order = order_[f];
    order.resize(x.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }
}

void check_weighted_problem(const Matrix& x, const Labels& y, std::span<const double> w) {
  if (x.rows() == 0 || x.cols() == 0) throw ParameterError("empty training data");
  if (y.size() != x.rows() || w.size() != x.rows()) throw ParameterError("X, y and w lengths differ");
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1 && y[i] != -1) throw ParameterError("labels must be +1 or -1");
    if (!(w[i] >= 0.0)) throw ParameterError("weights must be non-negative");
    total += w[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ParameterError("weights must sum to 1");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw ParameterError("training data contains non-finite values");
  }
}

double weighted_error(const Labels& y, const Labels& predicted, std::span<const double> w) {
  double error = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (predicted[i] != y[i]) error += w[i];
  }
  return error;
}

StumpFit fit_stump(const Matrix& x, const Labels& y, std::span<const double> w) {
  check_weighted_problem(x, y, w);
  return fit_stump(x, y, w, SortedColumns(x));
}

StumpFit fit_stump(const Matrix& x, const Labels& y, std::span<const double> w, const SortedColumns& sorted) {
  if (x.rows() == 0 || x.cols() == 0) throw ParameterError("empty training data");

  double best_error = std::numeric_limits<double>::infinity();
  for_each_candidate(x, y, w, sorted, [&](const Candidate& c) { best_error = std::min(best_error, c.error); });

  // Candidates arrive in tie-break order, so the first one within tolerance wins.
  std::optional<Candidate> chosen;
  for_each_candidate(x, y, w, sorted, [&](const Candidate& c) {
    if (!chosen && c.error <= best_error + kErrorTieTolerance) chosen = c;
  });

  StumpFit fit;
  fit.stump = Stump{chosen->feature, chosen->threshold, chosen->polarity};
  Labels predicted(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) predicted[i] = fit.stump.predict(x.row(i));
  fit.error = weighted_error(y, predicted, w);
  return fit;
}

}  // namespace deed
