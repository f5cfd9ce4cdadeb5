#include "deed/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "deed/analysis.hpp"
#include "deed/error.hpp"
#include "deed/eval.hpp"
#include "deed/feature_store.hpp"
#include "deed/manifest.hpp"
#include "deed/model_io.hpp"
#include "deed/report.hpp"
#include "deed/synthetic.hpp"
#include "json.hpp"

namespace deed::cli {

namespace fs = std::filesystem;

namespace {

/// Flags shared by every subcommand that fits a detector.
struct DetectorFlags {
  std::string detector = "adaboost";
  int rounds = 50;
  int depth = 1;
  double lambda = 0.01;
  int max_iter = 1000;
  double tol = 1e-6;
  std::uint32_t truncate_k = 0;
  std::string mode = "HS_PD";

  void add_to(CLI::App& app) {
    app.add_option("--detector", detector, "adaboost | linear_l1")->capture_default_str();
    app.add_option("--rounds", rounds, "AdaBoost rounds")->capture_default_str();
    app.add_option("--depth", depth, "AdaBoost base tree depth (1..3)")->capture_default_str();
    app.add_option("--lambda", lambda, "L1 penalty for linear_l1")->capture_default_str();
    app.add_option("--max-iter", max_iter, "linear_l1 iteration cap")->capture_default_str();
    app.add_option("--tol", tol, "linear_l1 objective-decrease tolerance")->capture_default_str();
    app.add_option("--truncate-k", truncate_k, "use only the top-k pd entries (0 = all)");
    app.add_option("--mode", mode, "feature mode: HS | PD | HS_PD")->capture_default_str();
  }

  eval::DetectorConfig config(std::uint64_t seed) const {
    eval::DetectorConfig c;
    c.kind = eval::parse_detector_kind(detector);
    c.adaboost = {rounds, depth, seed};
    c.linear = {lambda, max_iter, tol};
    if (truncate_k > 0) c.truncate_k = truncate_k;
    return c;
  }
  FeatureMode feature_mode() const { return parse_feature_mode(mode); }
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string out_dir;

  fs::path output(const std::string& path) const {
    fs::path p(path);
    if (p.is_relative() && !out_dir.empty()) p = fs::path(out_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
  }
};

void require_input(const std::string& path) {
  if (!fs::exists(path)) throw IoError("input not found: " + path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void print_reports(const Context& ctx, const std::vector<eval::EvalReport>& reports, const std::string& out_prefix) {
  ctx.out << report::csv_header() << '\n';
  for (const auto& r : reports) ctx.out << report::to_csv_line(r) << '\n';
  if (!out_prefix.empty()) {
    report::write_csv(reports, ctx.output(out_prefix + ".csv"));
    report::write_jsonl(reports, ctx.output(out_prefix + ".jsonl"));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"deed: knowledge-edit detection toolkit"};
  app.require_subcommand(1);
  Context ctx{out, err, {}};
  if (const char* env = std::getenv(kOutputDirEnv)) ctx.out_dir = env;
  app.add_option("--out-dir", ctx.out_dir, "directory for relative output paths (default $DEED_OUTPUT_DIR)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic feature file");
  std::string gen_preset = "le-like";
  std::string gen_profile;
  std::size_t gen_n = 500;
  std::uint32_t gen_hs = 64;
  std::uint32_t gen_pd = 50;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::string gen_manifest;
  std::string gen_shift_from;
  double gen_angle = 0.1;
  double gen_noise = 0.05;
  std::string gen_model_id;
  std::string gen_dataset;
  gen->add_option("--preset", gen_preset, "le-like | ml-like | none")->capture_default_str();
  gen->add_option("--profile", gen_profile, "JSON profile document (overrides --preset)");
  gen->add_option("--n", gen_n, "records per class")->capture_default_str();
  gen->add_option("--hs-dim", gen_hs, "hidden-state width")->capture_default_str();
  gen->add_option("--pd-k", gen_pd, "number of stored probabilities")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("-o,--output", gen_out, "output .deed path")->required();
  gen->add_option("--manifest", gen_manifest, "also write a synthetic fact manifest (JSON Lines)");
  gen->add_option("--shift-from", gen_shift_from, "instead of generating, domain-shift this .deed file");
  gen->add_option("--angle", gen_angle, "rotation angle in radians for --shift-from")->capture_default_str();
  gen->add_option("--noise", gen_noise, "noise level for --shift-from")->capture_default_str();
  gen->add_option("--model-id", gen_model_id, "override the header model_id");
  gen->add_option("--dataset", gen_dataset, "override the header dataset");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "print a feature file's header and class statistics");
  std::string inspect_path;
  inspect->add_option("file", inspect_path, ".deed file")->required();

  // train
  auto* train = app.add_subcommand("train", "fit a detector on a feature file");
  std::string train_data;
  std::string train_out;
  std::uint64_t train_seed = 0;
  DetectorFlags train_flags;
  train->add_option("--data", train_data, "training .deed file")->required();
  train->add_option("-o,--output", train_out, "model JSON path")->required();
  train->add_option("--seed", train_seed, "seed recorded in the model")->capture_default_str();
  train_flags.add_to(*train);

  // predict
  auto* pred = app.add_subcommand("predict", "label facts with a trained model");
  std::string pred_model;
  std::string pred_data;
  std::string pred_out;
  pred->add_option("--model", pred_model, "model JSON")->required();
  pred->add_option("--data", pred_data, ".deed file to label")->required();
  pred->add_option("-o,--output", pred_out, "CSV path (default: standard output)");

  // eval
  auto* ev = app.add_subcommand("eval", "train and evaluate one detector");
  std::string ev_train;
  std::string ev_test;
  std::string ev_data;
  std::string ev_same_object;
  std::string ev_kind;
  std::string ev_out;
  std::size_t ev_n_train = 126;
  std::uint64_t ev_seed = 0;
  DetectorFlags ev_flags;
  ev->add_option("--train", ev_train, "training .deed file");
  ev->add_option("--test", ev_test, "test .deed file");
  ev->add_option("--data", ev_data, "single .deed file to split into train/test");
  ev->add_option("--n-train", ev_n_train, "training size when splitting (balanced)")->capture_default_str();
  ev->add_option("--seed", ev_seed, "split seed")->capture_default_str();
  ev->add_option("--same-object", ev_same_object, "fact manifest; restrict the test set to same-object pairs");
  ev->add_option("--kind", ev_kind, "override the inferred experiment kind");
  ev->add_option("-o,--output", ev_out, "write <prefix>.csv and <prefix>.jsonl");
  ev_flags.add_to(*ev);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "training-size sweep");
  std::string sw_data;
  std::vector<std::size_t> sw_sizes = eval::kDefaultSweepSizes;
  std::vector<std::uint64_t> sw_seeds;
  std::size_t sw_n_seeds = 10;
  std::size_t sw_workers = default_workers();
  std::string sw_out;
  DetectorFlags sw_flags;
  sweep->add_option("--data", sw_data, ".deed file")->required();
  sweep->add_option("--sizes", sw_sizes, "training sizes (even)")->delimiter(',');
  sweep->add_option("--seeds", sw_seeds, "explicit seeds")->delimiter(',');
  sweep->add_option("--n-seeds", sw_n_seeds, "seeds 0..n-1 when --seeds is absent")->capture_default_str();
  sweep->add_option("--workers", sw_workers, "parallel cells");
  sweep->add_option("-o,--output", sw_out, "write <prefix>.csv and <prefix>.jsonl");
  sw_flags.add_to(*sweep);

  // layers
  auto* layers = app.add_subcommand("layers", "per-layer HS sweep with L1 logistic regression");
  std::vector<std::string> ly_files;
  double ly_lambda = 0.01;
  std::size_t ly_n_train = 126;
  std::uint64_t ly_seed = 0;
  std::size_t ly_workers = default_workers();
  std::string ly_out;
  layers->add_option("files", ly_files, "per-layer .deed files")->required();
  layers->add_option("--lambda", ly_lambda, "L1 penalty")->capture_default_str();
  layers->add_option("--n-train", ly_n_train, "training size")->capture_default_str();
  layers->add_option("--seed", ly_seed, "split seed")->capture_default_str();
  layers->add_option("--workers", ly_workers, "parallel layers");
  layers->add_option("-o,--output", ly_out, "CSV path (default: standard output)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "emit plot data");
  analyze->require_subcommand(1);
  auto* lda = analyze->add_subcommand("lda", "1-D Fisher LDA projection of hidden states");
  std::string lda_data;
  std::string lda_out;
  std::uint64_t lda_seed = 0;
  lda->add_option("--data", lda_data, ".deed file")->required();
  lda->add_option("-o,--output", lda_out, "CSV path")->required();
  lda->add_option("--seed", lda_seed, "jitter seed")->capture_default_str();
  auto* kde = analyze->add_subcommand("kde", "KDE of mean top-10 probability per class");
  std::string kde_data;
  std::string kde_out;
  kde->add_option("--data", kde_data, ".deed file")->required();
  kde->add_option("-o,--output", kde_out, "CSV path")->required();

  // report
  auto* rep = app.add_subcommand("report", "merge report files into one CSV table");
  std::vector<std::string> rep_files;
  std::string rep_out;
  rep->add_option("files", rep_files, "report .csv or .jsonl files")->required();
  rep->add_option("-o,--output", rep_out, "CSV path (default: standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kExitValidation;
  }

  try {
    if (*gen) {
      FeatureSet set;
      if (!gen_shift_from.empty()) {
        require_input(gen_shift_from);
        set = synthetic::generate_domain_shifted(read_feature_file(gen_shift_from), gen_angle, gen_noise, gen_seed);
      } else {
        synthetic::EditEffectProfile profile;
        if (!gen_profile.empty()) {
          require_input(gen_profile);
          profile = synthetic::read_profile(gen_profile);
          profile.seed = gen_seed;
        } else {
          profile = synthetic::preset(gen_preset, gen_seed);
        }
        set = synthetic::generate(profile, gen_n, gen_hs, gen_pd);
      }
      if (!gen_model_id.empty()) set.header.model_id = gen_model_id;
      if (!gen_dataset.empty()) set.header.dataset = gen_dataset;
      write_feature_file(set, ctx.output(gen_out));
      if (!gen_manifest.empty()) write_manifest(synthetic::generate_manifest(set, 8, gen_seed), ctx.output(gen_manifest));
      err << "wrote " << set.records.size() << " records\n";
    } else if (*inspect) {
      require_input(inspect_path);
      const FeatureSet set = read_feature_file(inspect_path);
      const auto& h = set.header;
      nlohmann::ordered_json doc;
      doc["version"] = h.format_version;
      doc["model_id"] = h.model_id;
      doc["editor"] = h.editor;
      doc["dataset"] = h.dataset;
      doc["layer_index"] = h.layer_index;
      doc["token_position"] = h.token_position;
      doc["hs_dim"] = h.hs_dim;
      doc["pd_k"] = h.pd_k;
      doc["record_count"] = h.record_count;
      for (Label label : {Label::kUnedited, Label::kEdited}) {
        double top1 = 0.0;
        double norm = 0.0;
        std::size_t n = 0;
        for (const auto& r : set.records) {
          if (r.label != label) continue;
          ++n;
          top1 += r.pd[0];
          double sq = 0.0;
          for (float v : r.hs) sq += static_cast<double>(v) * v;
          norm += std::sqrt(sq);
        }
        const char* name = label == Label::kEdited ? "edited" : "unedited";
        doc[name] = {{"count", n}, {"mean_top1", n ? top1 / n : 0.0}, {"mean_hs_norm", n ? norm / n : 0.0}};
      }
      out << doc.dump(2) << '\n';
    } else if (*train) {
      require_input(train_data);
      const FeatureSet set = read_feature_file(train_data);
      const DetectorModel model =
          eval::train_detector(set, train_flags.feature_mode(), train_flags.config(train_seed));
      write_model(model, ctx.output(train_out));
    } else if (*pred) {
      require_input(pred_model);
      require_input(pred_data);
      const DetectorModel model = read_model(pred_model);
      const FeatureSet set = read_feature_file(pred_data);
      const ModelInputs& inputs = model_inputs(model);
      const AssembledData data = assemble_vectors(set, inputs.feature_mode, inputs.truncate_k);
      const Labels labels = predict(model, data.x);
      std::ostringstream csv;
      csv << "fact_id,predicted\n";
      for (std::size_t i = 0; i < labels.size(); ++i) {
        csv << set.records[i].fact_id << ',' << (labels[i] > 0 ? 1 : 0) << '\n';
      }
      if (pred_out.empty()) {
        out << csv.str();
      } else {
        write_text(ctx.output(pred_out), csv.str());
      }
    } else if (*ev) {
      FeatureSet train_set;
      FeatureSet test_set;
      if (!ev_data.empty()) {
        if (!ev_train.empty() || !ev_test.empty()) throw ParameterError("use either --data or --train/--test");
        require_input(ev_data);
        auto split = eval::make_split(read_feature_file(ev_data), {ev_n_train, ev_seed, true});
        train_set = std::move(split.train);
        test_set = std::move(split.test);
      } else {
        if (ev_train.empty() || ev_test.empty()) throw ParameterError("eval needs --data or both --train and --test");
        require_input(ev_train);
        require_input(ev_test);
        train_set = read_feature_file(ev_train);
        test_set = read_feature_file(ev_test);
      }
      std::optional<eval::ExperimentKind> kind;
      if (!ev_kind.empty()) kind = eval::parse_experiment_kind(ev_kind);
      if (!ev_same_object.empty()) {
        require_input(ev_same_object);
        test_set = eval::pair_same_object(test_set, read_manifest(ev_same_object));
        if (!kind) kind = eval::ExperimentKind::kSameObject;
      }
      auto config = ev_flags.config(ev_seed);
      eval::EvalReport r = eval::run_eval(train_set, test_set, ev_flags.feature_mode(), config, kind);
      r.seed = ev_seed;
      print_reports(ctx, {r}, ev_out);
    } else if (*sweep) {
      require_input(sw_data);
      if (sw_seeds.empty()) {
        for (std::size_t s = 0; s < sw_n_seeds; ++s) sw_seeds.push_back(s);
      }
      const auto reports = eval::sweep_training_size(
          read_feature_file(sw_data), sw_sizes, sw_flags.feature_mode(), sw_seeds, sw_flags.config(0), sw_workers,
          [&](const std::string& msg) { err << "warning: " << msg << '\n'; });
      print_reports(ctx, reports, sw_out);
    } else if (*layers) {
      std::vector<fs::path> paths;
      for (const auto& f : ly_files) {
        require_input(f);
        paths.emplace_back(f);
      }
      const auto points = eval::layer_sweep(paths, ly_lambda, {ly_n_train, ly_seed, true}, ly_workers);
      const std::string csv = eval::layer_grid_csv(points);
      if (ly_out.empty()) {
        out << csv;
      } else {
        write_text(ctx.output(ly_out), csv);
      }
    } else if (*lda) {
      require_input(lda_data);
      const FeatureSet set = read_feature_file(lda_data);
      const auto projection = analysis::lda_project(set);
      analysis::emit_lda_csv(set, projection, lda_seed, ctx.output(lda_out));
      err << "separation " << projection.separation << '\n';
    } else if (*kde) {
      require_input(kde_data);
      analysis::emit_kde_csv(analysis::mean_top10_kde(read_feature_file(kde_data)), ctx.output(kde_out));
    } else if (*rep) {
      std::vector<fs::path> paths;
      for (const auto& f : rep_files) {
        require_input(f);
        paths.emplace_back(f);
      }
      const std::string csv = report::merge_to_csv(paths);
      if (rep_out.empty()) {
        out << csv;
      } else {
        write_text(ctx.output(rep_out), csv);
      }
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace deed::cli
