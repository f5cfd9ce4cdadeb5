#include "deed/linear_l1.hpp"

#include <algorithm>
#include <cmath>

#include "deed/error.hpp"

namespace deed {

namespace {

/// log(1 + exp(-m)) without overflow.
double logistic_loss(double margin) {
  return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

/// 1 / (1 + exp(m)), i.e. sigmoid(-m).
double sigmoid_neg(double margin) {
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(margin));
}

constexpr double kMinStd = 1e-12;

}  // namespace

double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

double LinearL1Model::score(std::span<const double> row) const {
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (stds[j] > 0.0) z += weights[j] * (row[j] - means[j]) / stds[j];
  }
  return z;
}

Matrix standardize(const LinearL1Model& model, const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out(i, j) = model.stds[j] > 0.0 ? (x(i, j) - model.means[j]) / model.stds[j] : 0.0;
    }
  }
  return out;
}

Labels predict(const LinearL1Model& model, const Matrix& x) {
  if (x.cols() != model.inputs.input_dim || x.cols() != model.weights.size()) {
    throw ParameterError("input has " + std::to_string(x.cols()) + " columns, model expects " +
                         std::to_string(model.weights.size()));
  }
  Labels out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.score(x.row(i)) > 0.0 ? 1 : -1;
  return out;
}

double l1_logistic_objective(const Matrix& x_std, const Labels& y, std::span<const double> weights, double bias,
                             double lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x_std.rows(); ++i) {
    double z = bias;
    const auto row = x_std.row(i);
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * row[j];
    loss += logistic_loss(y[i] * z);
  }
  double penalty = 0.0;
  for (double wj : weights) penalty += std::abs(wj);
  return loss / static_cast<double>(x_std.rows()) + lambda * penalty;
}

double proximal_step(const Matrix& x_std) {
  double frob = 0.0;
  for (double v : x_std.data()) frob += v * v;
  const auto n = static_cast<double>(x_std.rows());
  return n / (0.25 * frob + n);
}

LinearL1Model fit_linear_l1(const Matrix& x, const Labels& y, const LinearL1Config& config) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n == 0 || d == 0) throw ParameterError("empty training data");
  if (y.size() != n) throw ParameterError("X and y lengths differ");
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) throw ParameterError("lambda must be >= 0");
  if (config.max_iter < 0 || !(config.tol >= 0.0)) throw ParameterError("bad max_iter or tol");
  for (int label : y) {
    if (label != 1 && label != -1) throw ParameterError("labels must be +1 or -1");
  }
  if (std::find(y.begin(), y.end(), 1) == y.end() || std::find(y.begin(), y.end(), -1) == y.end()) {
    throw ParameterError("L1 logistic regression needs both classes in the training data");
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw ParameterError("training data contains non-finite values");
  }

  LinearL1Model model;
  model.lambda = config.lambda;
  model.inputs.input_dim = d;
  model.means.assign(d, 0.0);
  model.stds.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    const double std = std::sqrt(var / static_cast<double>(n));
    model.means[j] = mean;
    model.stds[j] = std > kMinStd * std::max(1.0, std::abs(mean)) ? std : 0.0;
  }
  const Matrix xs = standardize(model, x);
  const double step = proximal_step(xs);

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  double objective = l1_logistic_objective(xs, y, w, b, config.lambda);
  model.objective_history.push_back(objective);

  std::vector<double> grad(d);
  std::vector<double> w_next(d);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int iter = 0; iter < config.max_iter; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = xs.row(i);
      double z = b;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * row[j];
      const double coef = -y[i] * sigmoid_neg(y[i] * z) * inv_n;
      for (std::size_t j = 0; j < d; ++j) grad[j] += coef * row[j];
      grad_b += coef;
    }
    for (std::size_t j = 0; j < d; ++j) {
      w_next[j] = model.stds[j] > 0.0 ? soft_threshold(w[j] - step * grad[j], step * config.lambda) : 0.0;
    }
    const double b_next = b - step * grad_b;
    const double next_objective = l1_logistic_objective(xs, y, w_next, b_next, config.lambda);
    if (next_objective > objective) break;

    w.swap(w_next);
    b = b_next;
    const double decrease = objective - next_objective;
    objective = next_objective;
    model.objective_history.push_back(objective);
    if (decrease < config.tol) break;
  }
  model.weights = std::move(w);
  model.bias = b;
  return model;
}

}  // namespace deed
