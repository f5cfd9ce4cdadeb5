// Independent reference computations for tests. Nothing here calls into the
// code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

namespace deed::testing {

struct BruteStump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double error = 0.0;
};

/// Enumerates every stump candidate and sums each one's error directly.
/// Tie order: smaller error (within tol), feature, threshold, polarity +1.
inline BruteStump brute_force_stump(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                    const std::vector<double>& w, double tol = 1e-12) {
  const std::size_t n = x.size();
  const std::size_t d = x[0].size();
  std::vector<BruteStump> all;
  for (std::size_t f = 0; f < d; ++f) {
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(x[i][f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double> thresholds = {std::numeric_limits<double>::lowest()};
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      thresholds.push_back(values[k] + (values[k + 1] - values[k]) / 2.0);
    }
    for (double t : thresholds) {
      for (int polarity : {1, -1}) {
        double error = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const int h = x[i][f] > t ? polarity : -polarity;
          if (h != y[i]) error += w[i];
        }
        all.push_back({f, t, polarity, error});
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : all) best = std::min(best, c.error);
  std::vector<BruteStump> tied;
  for (const auto& c : all) {
    if (c.error <= best + tol) tied.push_back(c);
  }
  return *std::min_element(tied.begin(), tied.end(), [](const BruteStump& a, const BruteStump& b) {
    if (a.feature != b.feature) return a.feature < b.feature;
    if (a.threshold != b.threshold) return a.threshold < b.threshold;
    return a.polarity > b.polarity;
  });
}

inline double normal_pdf(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }

/// P, R, F1, accuracy straight from a confusion matrix.
struct HandMetrics {
  double precision, recall, f1, accuracy;
};

inline HandMetrics hand_metrics(double tp, double fp, double fn, double tn) {
  const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  const double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  return {p, r, f1, (tp + tn) / (tp + fp + fn + tn)};
}

}  // namespace deed::testing
