#include "deed/eval.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "deed/error.hpp"
#include "deed/random.hpp"
#include "deed/synthetic.hpp"
#include "oracles.hpp"

namespace deed::eval {
namespace {

FeatureSet make_set(std::size_t edited, std::size_t unedited, std::uint32_t first_id = 0) {
  FeatureSet set;
  set.header.model_id = "m";
  set.header.editor = "e";
  set.header.dataset = "d";
  set.header.hs_dim = 1;
  set.header.pd_k = 1;
  std::uint32_t id = first_id;
  for (std::size_t i = 0; i < edited + unedited; ++i) {
    FeatureRecord r;
    r.fact_id = id++;
    r.label = i < edited ? Label::kEdited : Label::kUnedited;
    r.hs = {static_cast<float>(i)};
    r.pd = {0.5f};
    set.records.push_back(r);
  }
  set.header.record_count = set.records.size();
  return set;
}

std::set<std::uint32_t> ids(const FeatureSet& set) {
  std::set<std::uint32_t> out;
  for (const auto& r : set.records) out.insert(r.fact_id);
  return out;
}

TEST(Metrics, WorkedExample) {
  const Metrics m = metrics_from_counts(9, 1, 3, 7);
  EXPECT_NEAR(m.precision, 0.9, 1e-12);
  EXPECT_NEAR(m.recall, 0.75, 1e-12);
  EXPECT_NEAR(m.f1, 2 * 0.9 * 0.75 / 1.65, 1e-12);
  EXPECT_NEAR(m.f1, 0.8182, 1e-4);
  EXPECT_NEAR(m.accuracy, 0.8, 1e-12);
  EXPECT_EQ(m.total(), 20u);
}

TEST(Metrics, DegenerateCountsAreZero) {
  const Metrics m = metrics_from_counts(0, 0, 5, 5);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_EQ(m.accuracy, 0.5);
}

TEST(Metrics, ComputeMatchesHandCount) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    Labels truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = rng.uniform() < 0.5 ? 1 : -1;
      pred[i] = rng.uniform() < 0.5 ? 1 : -1;
    }
    const Metrics m = compute_metrics(truth, pred);
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      (truth[i] > 0 ? (pred[i] > 0 ? tp : fn) : (pred[i] > 0 ? fp : tn)) += 1;
    }
    const auto h = testing::hand_metrics(tp, fp, fn, tn);
    EXPECT_NEAR(m.precision, h.precision, 1e-12);
    EXPECT_NEAR(m.recall, h.recall, 1e-12);
    EXPECT_NEAR(m.f1, h.f1, 1e-12);
    EXPECT_NEAR(m.accuracy, h.accuracy, 1e-12);
  }
  EXPECT_THROW(compute_metrics({1}, {1, 1}), ParameterError);
}

TEST(Split, BalancedShapes) {
  const FeatureSet set = make_set(127, 1874);
  const Split s = make_split(set, {126, 7, true});
  EXPECT_EQ(s.train.count(Label::kEdited), 63u);
  EXPECT_EQ(s.train.count(Label::kUnedited), 63u);
  EXPECT_EQ(s.test.count(Label::kEdited), 64u);
  EXPECT_EQ(s.test.count(Label::kUnedited), 64u);
  for (auto id : ids(s.train)) EXPECT_FALSE(ids(s.test).contains(id));
  EXPECT_EQ(s.train.header.record_count, 126u);
}

TEST(Split, EmptyTestClassIsAnError) {
  EXPECT_THROW(make_split(make_set(63, 2000), {126, 0, true}), ParameterError);
  EXPECT_THROW(make_split(make_set(100, 100), {125, 0, true}), ParameterError);
}

TEST(Split, DeterministicPerSeed) {
  const FeatureSet set = make_set(200, 300);
  EXPECT_EQ(make_split(set, {50, 3, true}).train, make_split(set, {50, 3, true}).train);
  EXPECT_NE(make_split(set, {50, 3, true}).train, make_split(set, {50, 4, true}).train);
}

TEST(Kind, Inference) {
  FeatureSetHeader a;
  a.model_id = "gpt-j";
  a.dataset = "counterfact";
  FeatureSetHeader b = a;
  EXPECT_EQ(infer_kind(a, b), ExperimentKind::kId);
  b.model_id = "llama";
  EXPECT_EQ(infer_kind(a, b), ExperimentKind::kCd);
  b = a;
  b.dataset = "zsre";
  EXPECT_EQ(infer_kind(a, b), ExperimentKind::kCrossDataset);
  for (auto k : {ExperimentKind::kId, ExperimentKind::kCd, ExperimentKind::kCrossDataset, ExperimentKind::kSameObject,
                 ExperimentKind::kSweepPoint, ExperimentKind::kLayerPoint}) {
    EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
  }
}

TEST(Eval, ContaminationRejected) {
  const FeatureSet set = synthetic::generate(synthetic::le_like(1), 100, 8, 10);
  try {
    run_eval(set, set, FeatureMode::kHsPd, {});
    FAIL() << "expected contamination error";
  } catch (const ContaminationError& e) {
    EXPECT_NE(std::string(e.what()).find("contamination"), std::string::npos);
  }
}

TEST(Eval, LeLikeIsDetected) {
  const FeatureSet set = synthetic::generate(synthetic::le_like(1), 500, 64, 10);
  const Split s = make_split(set, {126, 1, true});
  const EvalReport r = run_eval(s.train, s.test, FeatureMode::kHsPd, {});
  EXPECT_GE(r.metrics.f1, 0.9);
  EXPECT_EQ(r.experiment_kind, ExperimentKind::kId);
  EXPECT_EQ(r.n_train, 126u);
  EXPECT_EQ(r.n_test, s.test.size());
}

TEST(Eval, NoEffectIsChance) {
  double total = 0;
  const int seeds = 6;
  for (int seed = 0; seed < seeds; ++seed) {
    const FeatureSet set = synthetic::generate(synthetic::none(seed), 400, 32, 10);
    const Split s = make_split(set, {126, static_cast<std::uint64_t>(seed), true});
    total += run_eval(s.train, s.test, FeatureMode::kHsPd, {}).metrics.f1;
  }
  EXPECT_GE(total / seeds, 0.35);
  EXPECT_LE(total / seeds, 0.65);
}

TEST(Eval, BothDetectorsAndAllModes) {
  const FeatureSet set = synthetic::generate(synthetic::le_like(2), 200, 16, 10);
  const Split s = make_split(set, {126, 2, true});
  for (auto kind : {DetectorKind::kAdaBoost, DetectorKind::kLinearL1}) {
    for (auto mode : {FeatureMode::kHs, FeatureMode::kPd, FeatureMode::kHsPd}) {
      DetectorConfig cfg;
      cfg.kind = kind;
      const EvalReport r = run_eval(s.train, s.test, mode, cfg);
      EXPECT_EQ(r.feature_mode, mode);
      EXPECT_EQ(r.detector, kind);
      EXPECT_GE(r.metrics.f1, 0.7) << to_string(kind) << " " << to_string(mode);
    }
  }
}

TEST(Sweep, SingleSizeMatchesDirectEval) {
  const FeatureSet set = synthetic::generate(synthetic::le_like(3), 200, 16, 10);
  const auto reports = sweep_training_size(set, {10}, FeatureMode::kHsPd, {5}, {});
  ASSERT_EQ(reports.size(), 1u);
  const Split s = make_split(set, {10, 5, true});
  const EvalReport direct = run_eval(s.train, s.test, FeatureMode::kHsPd, {});
  EXPECT_EQ(reports[0].metrics, direct.metrics);
  EXPECT_EQ(reports[0].experiment_kind, ExperimentKind::kSweepPoint);
}

TEST(Sweep, DuplicatesWarnedAndDropped) {
  const FeatureSet set = synthetic::generate(synthetic::le_like(3), 200, 8, 10);
  std::vector<std::string> warnings;
  const auto reports = sweep_training_size(set, {50, 10, 50}, FeatureMode::kHsPd, {0, 1}, {}, 2,
                                           [&](const std::string& w) { warnings.push_back(w); });
  EXPECT_EQ(warnings.size(), 1u);
  ASSERT_EQ(reports.size(), 4u);
  // First-occurrence order, size-major.
  EXPECT_EQ(reports[0].n_train, 50u);
  EXPECT_EQ(reports[3].n_train, 10u);
  // Cells sharing a seed are evaluated on the same test pool.
  EXPECT_EQ(reports[0].n_test, reports[2].n_test);
}

TEST(Sweep, ParallelMatchesSerial) {
  const FeatureSet set = synthetic::generate(synthetic::ml_like(3), 200, 8, 10);
  const auto a = sweep_training_size(set, {10, 50, 100}, FeatureMode::kHsPd, {0, 1, 2}, {}, 1);
  const auto b = sweep_training_size(set, {10, 50, 100}, FeatureMode::kHsPd, {0, 1, 2}, {}, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].metrics, b[i].metrics);
}

Manifest manifest_for(const FeatureSet& set, const std::vector<std::string>& objects) {
  Manifest m;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    FactRecord f;
    f.fact_id = set.records[i].fact_id;
    f.subject = "s" + std::to_string(i);
    f.relation = "r";
    f.edit_prompt = "p";
    f.paraphrase_prompt = "q";
    f.label = set.records[i].label;
    f.original_object = set.records[i].label == Label::kEdited ? "Paris" : objects[i];
    f.new_object = set.records[i].label == Label::kEdited ? objects[i] : "";
    m[f.fact_id] = f;
  }
  return m;
}

TEST(SameObject, PairsSharedObjects) {
  // Records 0,1 edited; 2,3,4 unedited.
  const FeatureSet set = make_set(2, 3);
  const Manifest m = manifest_for(set, {"Berlin", "Tokyo", "Rome", "Berlin", "Berlin"});
  const FeatureSet out = pair_same_object(set, m);
  ASSERT_EQ(out.records.size(), 2u);
  EXPECT_EQ(out.records[0].fact_id, 0u);
  EXPECT_EQ(out.records[1].fact_id, 3u);
  EXPECT_EQ(out.count(Label::kEdited), out.count(Label::kUnedited));
}

TEST(SameObject, NoMatchIsEmptyResult) {
  const FeatureSet set = make_set(1, 1);
  EXPECT_THROW(pair_same_object(set, manifest_for(set, {"Oslo", "Lima"})), EmptyResultError);
  EXPECT_THROW(pair_same_object(set, Manifest{}), ParameterError);
}

FeatureSet layer(int index, bool separable, std::uint64_t seed) {
  FeatureSet set = synthetic::generate(separable ? synthetic::le_like(seed) : synthetic::none(seed), 200, 16, 10);
  set.header.editor = "SYNTH";
  set.header.layer_index = index;
  return set;
}

TEST(Layers, SingleLayerMatchesDirectLinearEval) {
  const FeatureSet set = layer(4, true, 1);
  const auto points = layer_sweep({set}, 0.01);
  ASSERT_EQ(points.size(), 1u);
  const Split s = make_split(set, {});
  DetectorConfig cfg;
  cfg.kind = DetectorKind::kLinearL1;
  EXPECT_EQ(points[0].report.metrics, run_eval(s.train, s.test, FeatureMode::kHs, cfg).metrics);
  EXPECT_EQ(points[0].layer_index, 4);
  EXPECT_EQ(layer_grid_csv(points).substr(0, 15), "layer_index,f1\n");
}

TEST(Layers, PlantedSeparationAppearsAfterEditedLayer) {
  std::vector<FeatureSet> layers;
  for (int l = 0; l < 6; ++l) layers.push_back(layer(l, l >= 3, 10 + l));
  std::swap(layers[0], layers[5]);
  const auto points = layer_sweep(layers, 0.01, {}, 3);
  ASSERT_EQ(points.size(), 6u);
  double before = 0;
  for (int l = 0; l < 6; ++l) {
    EXPECT_EQ(points[l].layer_index, l);
    if (l < 3) before += points[l].report.metrics.f1 / 3;
    else EXPECT_GE(points[l].report.metrics.f1, 0.8);
  }
  EXPECT_LE(before, 0.7);
}

TEST(Layers, MixedHeadersRejected) {
  FeatureSet a = layer(0, false, 1), b = layer(1, false, 2);
  b.header.editor = "OTHER";
  EXPECT_THROW(layer_sweep({a, b}, 0.01), ParameterError);
}

TEST(ParallelFor, LowestIndexExceptionWins) {
  try {
    parallel_for(20, 4, [](std::size_t i) {
      if (i == 7 || i == 13) throw ParameterError(std::to_string(i));
    });
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

}  // namespace
}  // namespace deed::eval
