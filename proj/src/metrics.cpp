#include "deed/metrics.hpp"

#include "deed/error.hpp"

namespace deed {

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double Metrics::true_negative_rate() const { return ratio(tn, tn + fp); }

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  Metrics m{tp, fp, fn, tn};
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.accuracy = ratio(tp + tn, m.total());
  return m;
}

Metrics compute_metrics(const Labels& y_true, const Labels& y_pred) {
  if (y_true.size() != y_pred.size()) throw ParameterError("y_true and y_pred lengths differ");
  if (y_true.empty()) throw ParameterError("no predictions to score");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if ((t != 1 && t != -1) || (p != 1 && p != -1)) throw ParameterError("labels must be +1 or -1");
    if (t == 1) {
      (p == 1 ? tp : fn) += 1;
    } else {
      (p == 1 ? fp : tn) += 1;
    }
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

}  // namespace deed
