#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deed/adaboost.hpp"
#include "deed/feature_store.hpp"
#include "deed/linear_l1.hpp"
#include "deed/manifest.hpp"
#include "deed/metrics.hpp"
#include "deed/model_io.hpp"

namespace deed::eval {

enum class ExperimentKind { kId, kCd, kCrossDataset, kSameObject, kSweepPoint, kLayerPoint };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

struct SplitSpec {
  std::size_t n_train = 126;
  std::uint64_t seed = 0;
  bool balance_test = true;
};

struct Split {
  FeatureSet train;
  FeatureSet test;
};

enum class DetectorKind { kAdaBoost, kLinearL1 };

std::string_view to_string(DetectorKind kind);
DetectorKind parse_detector_kind(std::string_view text);

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kAdaBoost;
  AdaBoostConfig adaboost;
  LinearL1Config linear;
  std::optional<std::uint32_t> truncate_k;
};

/// One evaluated (train, test, feature mode) cell.
struct EvalReport {
  Metrics metrics;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  FeatureMode feature_mode = FeatureMode::kHsPd;
  ExperimentKind experiment_kind = ExperimentKind::kId;
  DetectorKind detector = DetectorKind::kAdaBoost;
  std::optional<std::uint32_t> truncate_k;
  std::uint64_t seed = 0;
  FeatureSetHeader train_header;
  FeatureSetHeader test_header;
};

/// Balanced training sample of n_train/2 per class; the rest is the test set,
/// downsampled to balance when requested. Output records keep input order.
Split make_split(const FeatureSet& set, const SplitSpec& spec);

/// ID for equal model_id and dataset, CD for a different model on the same
/// dataset, CROSS_DATASET when datasets differ.
ExperimentKind infer_kind(const FeatureSetHeader& train, const FeatureSetHeader& test);

/// Throws ContaminationError when the sets share a fact_id. Only checked for
/// the same dataset, since fact ids are unique per manifest.
void check_disjoint(const FeatureSet& train, const FeatureSet& test);

DetectorModel train_detector(const FeatureSet& train, FeatureMode mode, const DetectorConfig& config);

/// Fits on train, scores on test. `kind_override` replaces the inferred kind.
EvalReport run_eval(const FeatureSet& train, const FeatureSet& test, FeatureMode mode, const DetectorConfig& config,
                    std::optional<ExperimentKind> kind_override = std::nullopt);

/// Throws std::logic_error if the F1/accuracy identities do not hold.
void check_report_identities(const EvalReport& report);

using WarningSink = std::function<void(const std::string&)>;

/// Reports ordered by (size, seed) following the deduplicated input orders.
/// Each seed carves one test pool sized for the largest request, shared by
/// every size.
std::vector<EvalReport> sweep_training_size(const FeatureSet& set, std::vector<std::size_t> sizes, FeatureMode mode,
                                            const std::vector<std::uint64_t>& seeds, const DetectorConfig& config,
                                            std::size_t workers = 1, const WarningSink& warn = {});

inline const std::vector<std::size_t> kDefaultSweepSizes = {10, 50, 100, 150, 200, 250, 300};

/// Keeps each edited record whose new object equals the original object of
/// some unedited record, paired with the lowest-id unused such record.
FeatureSet pair_same_object(const FeatureSet& test, const Manifest& manifest);

struct LayerPoint {
  int layer_index = 0;
  EvalReport report;
};

/// L1 logistic regression on HS for each layer's set, after make_split(spec).
/// Results are ordered by layer (the last-layer alias -1 sorts last).
std::vector<LayerPoint> layer_sweep(const std::vector<FeatureSet>& layers, double lambda, const SplitSpec& spec = {},
                                    std::size_t workers = 1);
std::vector<LayerPoint> layer_sweep(const std::vector<std::filesystem::path>& files, double lambda,
                                    const SplitSpec& spec = {}, std::size_t workers = 1);

/// CSV "layer_index,f1".
std::string layer_grid_csv(const std::vector<LayerPoint>& points);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Exceptions are
/// rethrown on the caller's thread (the lowest index wins).
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace deed::eval
