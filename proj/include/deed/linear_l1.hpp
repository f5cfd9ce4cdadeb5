#pragma once

#include <span>
#include <vector>

#include "deed/adaboost.hpp"
#include "deed/matrix.hpp"

namespace deed {

struct LinearL1Config {
  double lambda = 0.01;
  int max_iter = 1000;
  double tol = 1e-6;

  bool operator==(const LinearL1Config&) const = default;
};

/// Logistic regression on standardised inputs with an L1 penalty on the weights.
struct LinearL1Model {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 0.0;
  /// Training means and standard deviations. A zero std marks a dropped
  /// (constant) feature whose weight is fixed at 0.
  std::vector<double> means;
  std::vector<double> stds;
  /// Objective after each accepted iterate; entry 0 is the starting point.
  std::vector<double> objective_history;
  ModelInputs inputs;

  double score(std::span<const double> row) const;
  bool operator==(const LinearL1Model&) const = default;
};

/// sign(w . x_std + b), with 0 -> -1.
Labels predict(const LinearL1Model& model, const Matrix& x);

/// Mean logistic loss plus lambda * |w|_1 for already-standardised rows.
double l1_logistic_objective(const Matrix& x_std, const Labels& y, std::span<const double> weights, double bias,
                             double lambda);

/// Soft-thresholding operator: sign(v) * max(|v| - threshold, 0).
double soft_threshold(double v, double threshold);

/// Fixed proximal-gradient step n / (0.25 * |X_std|_F^2 + n).
double proximal_step(const Matrix& x_std);

/// Proximal gradient (ISTA) from w = 0, b = 0 with a fixed step. Stops when
/// the objective drops by less than tol, or after max_iter iterations. An
/// iterate that raises the objective is rejected and ends the fit.
LinearL1Model fit_linear_l1(const Matrix& x, const Labels& y, const LinearL1Config& config = {});

/// Standardises rows with the model's stored statistics.
Matrix standardize(const LinearL1Model& model, const Matrix& x);

}  // namespace deed
