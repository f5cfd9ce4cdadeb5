#include "deed/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <climits>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "deed/error.hpp"
#include "deed/random.hpp"

namespace deed::eval {

namespace {

std::string upper(std::string_view text) {
  std::string out;
  for (char c : text) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(c)));
  return out;
}

/// Each class's record indices, shuffled under the split seed.
struct ClassPools {
  std::vector<std::size_t> edited;
  std::vector<std::size_t> unedited;
};

ClassPools shuffled_pools(const FeatureSet& set, std::uint64_t seed) {
  ClassPools pools;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    (set.records[i].label == Label::kEdited ? pools.edited : pools.unedited).push_back(i);
  }
  Rng rng(seed);
  rng.shuffle(pools.edited);
  rng.shuffle(pools.unedited);
  return pools;
}

FeatureSet subset(const FeatureSet& set, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  std::vector<FeatureRecord> records;
  records.reserve(indices.size());
  for (std::size_t i : indices) records.push_back(set.records[i]);
  return with_records(set, std::move(records));
}

void check_train_size(std::size_t n_train) {
  if (n_train == 0 || n_train % 2 != 0) throw ParameterError("n_train must be a positive even number");
}

/// Train on the first `train_per_class` of each pool, test on everything from
/// `test_from` onward (balanced if requested).
Split carve(const FeatureSet& set, const ClassPools& pools, std::size_t train_per_class, std::size_t test_from,
            bool balance) {
  std::vector<std::size_t> train;
  train.insert(train.end(), pools.edited.begin(), pools.edited.begin() + static_cast<std::ptrdiff_t>(train_per_class));
  train.insert(train.end(), pools.unedited.begin(),
               pools.unedited.begin() + static_cast<std::ptrdiff_t>(train_per_class));

  std::size_t test_edited = pools.edited.size() - test_from;
  std::size_t test_unedited = pools.unedited.size() - test_from;
  if (balance) {
    if (test_edited == 0 || test_unedited == 0) {
      throw ParameterError("empty test class: no " + std::string(test_edited == 0 ? "edited" : "unedited") +
                           " records left after the training sample");
    }
    test_edited = test_unedited = std::min(test_edited, test_unedited);
  }
  if (test_edited + test_unedited == 0) throw ParameterError("no records left for testing");
  std::vector<std::size_t> test;
  const auto from = static_cast<std::ptrdiff_t>(test_from);
  test.insert(test.end(), pools.edited.begin() + from, pools.edited.begin() + from + static_cast<std::ptrdiff_t>(test_edited));
  test.insert(test.end(), pools.unedited.begin() + from,
              pools.unedited.begin() + from + static_cast<std::ptrdiff_t>(test_unedited));
  return {subset(set, std::move(train)), subset(set, std::move(test))};
}

void check_pool_sizes(const ClassPools& pools, std::size_t per_class) {
  if (per_class > pools.edited.size() || per_class > pools.unedited.size()) {
    throw ParameterError("insufficient records: need " + std::to_string(per_class) + " per class, have " +
                         std::to_string(pools.edited.size()) + " edited and " + std::to_string(pools.unedited.size()) +
                         " unedited");
  }
}

int layer_order(int layer) { return layer < 0 ? INT_MAX : layer; }

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kId: return "ID";
    case ExperimentKind::kCd: return "CD";
    case ExperimentKind::kCrossDataset: return "CROSS_DATASET";
    case ExperimentKind::kSameObject: return "SAME_OBJECT";
    case ExperimentKind::kSweepPoint: return "SWEEP_POINT";
    case ExperimentKind::kLayerPoint: return "LAYER_POINT";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  const std::string u = upper(text);
  for (auto kind : {ExperimentKind::kId, ExperimentKind::kCd, ExperimentKind::kCrossDataset,
                    ExperimentKind::kSameObject, ExperimentKind::kSweepPoint, ExperimentKind::kLayerPoint}) {
    if (u == to_string(kind)) return kind;
  }
  throw ParameterError("unknown experiment kind '" + std::string(text) + "'");
}

std::string_view to_string(DetectorKind kind) {
  return kind == DetectorKind::kAdaBoost ? "adaboost" : "linear_l1";
}

DetectorKind parse_detector_kind(std::string_view text) {
  const std::string u = upper(text);
  if (u == "ADABOOST") return DetectorKind::kAdaBoost;
  if (u == "LINEAR_L1" || u == "L1" || u == "LOGREG_L1") return DetectorKind::kLinearL1;
  throw ParameterError("unknown detector '" + std::string(text) + "'");
}

Split make_split(const FeatureSet& set, const SplitSpec& spec) {
  check_train_size(spec.n_train);
  const ClassPools pools = shuffled_pools(set, spec.seed);
  const std::size_t per_class = spec.n_train / 2;
  check_pool_sizes(pools, per_class);
  return carve(set, pools, per_class, per_class, spec.balance_test);
}

ExperimentKind infer_kind(const FeatureSetHeader& train, const FeatureSetHeader& test) {
  if (train.dataset != test.dataset) return ExperimentKind::kCrossDataset;
  if (train.model_id == test.model_id) return ExperimentKind::kId;
  return ExperimentKind::kCd;
}

void check_disjoint(const FeatureSet& train, const FeatureSet& test) {
  if (train.header.dataset != test.header.dataset) return;
  std::set<std::uint32_t> ids;
  for (const auto& r : train.records) ids.insert(r.fact_id);
  for (const auto& r : test.records) {
    if (ids.count(r.fact_id)) {
      throw ContaminationError("contamination: fact_id " + std::to_string(r.fact_id) +
                               " appears in both the training and the test set");
    }
  }
}

DetectorModel train_detector(const FeatureSet& train, FeatureMode mode, const DetectorConfig& config) {
  const AssembledData data = assemble_vectors(train, mode, config.truncate_k);
  ModelInputs inputs{mode, config.truncate_k, data.x.cols(), train.header};
  if (config.kind == DetectorKind::kAdaBoost) {
    AdaBoostModel model = fit_adaboost(data.x, data.y, config.adaboost);
    model.inputs = inputs;
    return model;
  }
  LinearL1Model model = fit_linear_l1(data.x, data.y, config.linear);
  model.inputs = inputs;
  return model;
}

void check_report_identities(const EvalReport& report) {
  const Metrics& m = report.metrics;
  constexpr double kTol = 1e-12;
  if (m.precision > 0.0 && m.recall > 0.0) {
    const double harmonic = 2.0 / (1.0 / m.precision + 1.0 / m.recall);
    if (std::abs(harmonic - m.f1) > kTol) throw std::logic_error("F1 is not the harmonic mean of P and R");
  }
  if (m.tp + m.fn == m.tn + m.fp && m.tp + m.fn > 0) {
    if (std::abs(m.accuracy - 0.5 * (m.recall + m.true_negative_rate())) > kTol) {
      throw std::logic_error("balanced accuracy identity violated");
    }
  }
  if (m.total() != report.n_test) throw std::logic_error("confusion counts do not match n_test");
}

EvalReport run_eval(const FeatureSet& train, const FeatureSet& test, FeatureMode mode, const DetectorConfig& config,
                    std::optional<ExperimentKind> kind_override) {
  if (train.records.empty() || test.records.empty()) throw ParameterError("train and test sets must be non-empty");
  check_disjoint(train, test);
  const bool need_hs = mode != FeatureMode::kPd;
  const bool need_pd = mode != FeatureMode::kHs;
  if (need_hs && train.header.hs_dim != test.header.hs_dim) throw ParameterError("hs_dim differs between train and test");
  if (need_pd && (train.header.pd_k != test.header.pd_k && !config.truncate_k)) {
    throw ParameterError("pd_k differs between train and test");
  }

  const DetectorModel model = train_detector(train, mode, config);
  const AssembledData test_data = assemble_vectors(test, mode, config.truncate_k);
  if (test_data.x.cols() != model_inputs(model).input_dim) throw ParameterError("train/test feature widths differ");
  const Labels predicted = predict(model, test_data.x);

  EvalReport report;
  report.metrics = compute_metrics(test_data.y, predicted);
  report.n_train = train.records.size();
  report.n_test = test.records.size();
  report.feature_mode = mode;
  report.experiment_kind = kind_override.value_or(infer_kind(train.header, test.header));
  report.detector = config.kind;
  report.truncate_k = config.truncate_k;
  report.seed = config.adaboost.seed;
  report.train_header = train.header;
  report.test_header = test.header;
  check_report_identities(report);
  return report;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<EvalReport> sweep_training_size(const FeatureSet& set, std::vector<std::size_t> sizes, FeatureMode mode,
                                            const std::vector<std::uint64_t>& seeds, const DetectorConfig& config,
                                            std::size_t workers, const WarningSink& warn) {
  if (sizes.empty() || seeds.empty()) throw ParameterError("sweep needs at least one size and one seed");
  std::vector<std::size_t> unique;
  for (std::size_t s : sizes) {
    check_train_size(s);
    if (std::find(unique.begin(), unique.end(), s) == unique.end()) {
      unique.push_back(s);
    } else if (warn) {
      warn("duplicate training size " + std::to_string(s) + " ignored");
    }
  }
  const std::size_t max_per_class = *std::max_element(unique.begin(), unique.end()) / 2;

  std::vector<ClassPools> pools;
  for (auto seed : seeds) {
    pools.push_back(shuffled_pools(set, seed));
    check_pool_sizes(pools.back(), max_per_class);
  }

  std::vector<EvalReport> reports(unique.size() * seeds.size());
  parallel_for(reports.size(), workers, [&](std::size_t cell) {
    const std::size_t size = unique[cell / seeds.size()];
    const std::size_t s = cell % seeds.size();
    const Split split = carve(set, pools[s], size / 2, max_per_class, true);
    DetectorConfig cell_config = config;
    cell_config.adaboost.seed = seeds[s];
    reports[cell] = run_eval(split.train, split.test, mode, cell_config, ExperimentKind::kSweepPoint);
    reports[cell].seed = seeds[s];
  });
  return reports;
}

FeatureSet pair_same_object(const FeatureSet& test, const Manifest& manifest) {
  auto fact = [&](std::uint32_t id) -> const FactRecord& {
    const auto it = manifest.find(id);
    if (it == manifest.end()) throw ParameterError("manifest has no entry for fact_id " + std::to_string(id));
    return it->second;
  };

  // Unedited candidates per object, lowest fact_id first.
  std::map<std::string, std::vector<std::pair<std::uint32_t, std::size_t>>> unedited_by_object;
  for (std::size_t i = 0; i < test.records.size(); ++i) {
    const auto& r = test.records[i];
    if (r.label == Label::kUnedited) unedited_by_object[fact(r.fact_id).original_object].emplace_back(r.fact_id, i);
  }
  for (auto& [object, candidates] : unedited_by_object) std::sort(candidates.begin(), candidates.end());
  std::map<std::string, std::size_t> used;

  std::vector<FeatureRecord> out;
  for (const auto& r : test.records) {
    if (r.label != Label::kEdited) continue;
    const auto it = unedited_by_object.find(fact(r.fact_id).new_object);
    if (it == unedited_by_object.end()) continue;
    std::size_t& next = used[it->first];
    if (next >= it->second.size()) continue;
    out.push_back(r);
    out.push_back(test.records[it->second[next].second]);
    ++next;
  }
  if (out.empty()) throw EmptyResultError("no edited test fact shares its object with an unedited fact");
  return with_records(test, std::move(out));
}

std::vector<LayerPoint> layer_sweep(const std::vector<FeatureSet>& layers, double lambda, const SplitSpec& spec,
                                    std::size_t workers) {
  if (layers.empty()) throw ParameterError("layer sweep needs at least one layer");
  const auto& first = layers.front().header;
  std::set<int> seen;
  for (const auto& set : layers) {
    const auto& h = set.header;
    if (h.model_id != first.model_id || h.editor != first.editor || h.dataset != first.dataset ||
        h.hs_dim != first.hs_dim || h.pd_k != first.pd_k || h.record_count != first.record_count) {
      throw ParameterError("layer files must share model, editor, dataset and dimensions");
    }
    if (!seen.insert(h.layer_index).second) {
      throw ParameterError("layer " + std::to_string(h.layer_index) + " given twice");
    }
  }

  std::vector<std::size_t> order(layers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return layer_order(layers[a].header.layer_index) < layer_order(layers[b].header.layer_index);
  });

  DetectorConfig config;
  config.kind = DetectorKind::kLinearL1;
  config.linear.lambda = lambda;
  config.adaboost.seed = spec.seed;
  std::vector<LayerPoint> points(layers.size());
  parallel_for(points.size(), workers, [&](std::size_t k) {
    const FeatureSet& set = layers[order[k]];
    const Split split = make_split(set, spec);
    points[k].layer_index = set.header.layer_index;
    points[k].report = run_eval(split.train, split.test, FeatureMode::kHs, config, ExperimentKind::kLayerPoint);
  });
  return points;
}

std::vector<LayerPoint> layer_sweep(const std::vector<std::filesystem::path>& files, double lambda,
                                    const SplitSpec& spec, std::size_t workers) {
  std::vector<FeatureSet> layers;
  layers.reserve(files.size());
  for (const auto& f : files) layers.push_back(read_feature_file(f));
  return layer_sweep(layers, lambda, spec, workers);
}

std::string layer_grid_csv(const std::vector<LayerPoint>& points) {
  std::ostringstream out;
  out.precision(17);
  out << "layer_index,f1\n";
  for (const auto& p : points) out << p.layer_index << ',' << p.report.metrics.f1 << '\n';
  return out.str();
}

}  // namespace deed::eval
