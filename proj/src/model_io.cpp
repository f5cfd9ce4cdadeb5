#include "deed/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "deed/error.hpp"
#include "json.hpp"

namespace deed {

namespace {

using Json = nlohmann::json;

constexpr std::string_view kFormatName = "deed-model";

Json header_json(const FeatureSetHeader& h) {
  return Json{{"model_id", h.model_id},       {"editor", h.editor}, {"dataset", h.dataset},
              {"layer_index", h.layer_index}, {"hs_dim", h.hs_dim}, {"pd_k", h.pd_k},
              {"record_count", h.record_count}};
}

FeatureSetHeader header_from(const Json& j) {
  FeatureSetHeader h;
  h.model_id = j.at("model_id").get<std::string>();
  h.editor = j.at("editor").get<std::string>();
  h.dataset = j.at("dataset").get<std::string>();
  h.layer_index = j.at("layer_index").get<int>();
  h.hs_dim = j.at("hs_dim").get<std::uint32_t>();
  h.pd_k = j.at("pd_k").get<std::uint32_t>();
  h.record_count = j.at("record_count").get<std::uint64_t>();
  return h;
}

Json inputs_json(const ModelInputs& in) {
  return Json{{"feature_mode", std::string(to_string(in.feature_mode))},
              {"truncate_k", in.truncate_k ? Json(*in.truncate_k) : Json(nullptr)},
              {"input_dim", in.input_dim},
              {"provenance", header_json(in.provenance)}};
}

ModelInputs inputs_from(const Json& doc) {
  ModelInputs in;
  try {
    in.feature_mode = parse_feature_mode(doc.at("feature_mode").get<std::string>());
  } catch (const ParameterError& e) {
    throw FormatError(e.what());
  }
  const Json& k = doc.at("truncate_k");
  if (!k.is_null()) in.truncate_k = k.get<std::uint32_t>();
  in.input_dim = doc.at("input_dim").get<std::size_t>();
  in.provenance = header_from(doc.at("provenance"));
  return in;
}

double finite(const Json& j) {
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw FormatError("non-finite number in model document");
  return v;
}

Json learner_json(const WeakLearner& learner) {
  if (const auto* stump = std::get_if<Stump>(&learner.rule)) {
    return Json{{"kind", "stump"},
                {"feature", stump->feature_index},
                {"threshold", stump->threshold},
                {"polarity", stump->polarity},
                {"alpha", learner.alpha}};
  }
  const auto& tree = std::get<DecisionTree>(learner.rule);
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf) {
      nodes.push_back(Json{{"leaf", n.leaf_class}});
    } else {
      nodes.push_back(Json{{"feature", n.feature_index}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
    }
  }
  return Json{{"kind", "tree"}, {"nodes", std::move(nodes)}, {"alpha", learner.alpha}};
}

WeakLearner learner_from(const Json& j) {
  WeakLearner learner;
  learner.alpha = finite(j.at("alpha"));
  const std::string kind = j.value("kind", std::string("stump"));
  if (kind == "stump") {
    Stump s;
    s.feature_index = j.at("feature").get<std::size_t>();
    s.threshold = finite(j.at("threshold"));
    s.polarity = j.at("polarity").get<int>();
    if (s.polarity != 1 && s.polarity != -1) throw FormatError("stump polarity must be +1 or -1");
    learner.rule = s;
  } else if (kind == "tree") {
    std::vector<TreeNode> nodes;
    for (const Json& n : j.at("nodes")) {
      TreeNode node;
      if (n.contains("leaf")) {
        node.is_leaf = true;
        node.leaf_class = n.at("leaf").get<int>();
      } else {
        node.is_leaf = false;
        node.feature_index = n.at("feature").get<std::size_t>();
        node.threshold = finite(n.at("threshold"));
        node.left = n.at("left").get<std::size_t>();
        node.right = n.at("right").get<std::size_t>();
      }
      nodes.push_back(node);
    }
    try {
      learner.rule = DecisionTree(std::move(nodes));
    } catch (const ParameterError& e) {
      throw FormatError(e.what());
    }
  } else {
    throw FormatError("unknown learner kind '" + kind + "'");
  }
  return learner;
}

std::size_t max_feature(const WeakLearner& learner) {
  if (const auto* stump = std::get_if<Stump>(&learner.rule)) return stump->feature_index;
  std::size_t m = 0;
  for (const auto& n : std::get<DecisionTree>(learner.rule).nodes()) {
    if (!n.is_leaf) m = std::max(m, n.feature_index);
  }
  return m;
}

Json to_json(const AdaBoostModel& model) {
  Json learners = Json::array();
  for (const auto& l : model.learners) learners.push_back(learner_json(l));
  return Json{{"format", kFormatName},
              {"version", kModelFormatVersion},
              {"type", "adaboost"},
              {"inputs", inputs_json(model.inputs)},
              {"config", {{"rounds", model.config.rounds}, {"base_depth", model.config.base_depth}, {"seed", model.config.seed}}},
              {"round_errors", model.round_errors},
              {"learners", std::move(learners)}};
}

Json to_json(const LinearL1Model& model) {
  return Json{{"format", kFormatName},
              {"version", kModelFormatVersion},
              {"type", "linear_l1"},
              {"inputs", inputs_json(model.inputs)},
              {"lambda", model.lambda},
              {"bias", model.bias},
              {"weights", model.weights},
              {"means", model.means},
              {"stds", model.stds},
              {"objective_history", model.objective_history}};
}

AdaBoostModel adaboost_from(const Json& doc) {
  AdaBoostModel model;
  model.inputs = inputs_from(doc.at("inputs"));
  const Json& config = doc.at("config");
  model.config.rounds = config.at("rounds").get<int>();
  model.config.base_depth = config.at("base_depth").get<int>();
  model.config.seed = config.at("seed").get<std::uint64_t>();
  model.round_errors = doc.at("round_errors").get<std::vector<double>>();
  for (const Json& l : doc.at("learners")) {
    model.learners.push_back(learner_from(l));
    if (max_feature(model.learners.back()) >= model.inputs.input_dim) {
      throw FormatError("learner feature index exceeds input_dim");
    }
  }
  return model;
}

LinearL1Model linear_from(const Json& doc) {
  LinearL1Model model;
  model.inputs = inputs_from(doc.at("inputs"));
  model.lambda = finite(doc.at("lambda"));
  model.bias = finite(doc.at("bias"));
  model.weights = doc.at("weights").get<std::vector<double>>();
  model.means = doc.at("means").get<std::vector<double>>();
  model.stds = doc.at("stds").get<std::vector<double>>();
  model.objective_history = doc.at("objective_history").get<std::vector<double>>();
  const std::size_t d = model.inputs.input_dim;
  if (model.weights.size() != d || model.means.size() != d || model.stds.size() != d) {
    throw FormatError("linear model vectors do not match input_dim");
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(model.weights[j]) || !std::isfinite(model.means[j]) || !(model.stds[j] >= 0.0)) {
      throw FormatError("invalid linear model parameters");
    }
  }
  return model;
}

}  // namespace

Labels predict(const DetectorModel& model, const Matrix& x) {
  return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

const ModelInputs& model_inputs(const DetectorModel& model) {
  return std::visit([](const auto& m) -> const ModelInputs& { return m.inputs; }, model);
}

std::string serialize_model(const DetectorModel& model) {
  return std::visit([](const auto& m) { return to_json(m).dump(2); }, model);
}

DetectorModel deserialize_model(std::string_view document) {
  try {
    const Json doc = Json::parse(document);
    if (doc.at("format").get<std::string>() != kFormatName) throw FormatError("not a deed model document");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) throw FormatError("unsupported model version " + std::to_string(version));
    const std::string type = doc.at("type").get<std::string>();
    if (type == "adaboost") return adaboost_from(doc);
    if (type == "linear_l1") return linear_from(doc);
    throw FormatError("unknown model type '" + type + "'");
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed model document: ") + e.what());
  }
}

WeakLearner learner_from_json(std::string_view document) {
  try {
    return learner_from(Json::parse(document));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed learner: ") + e.what());
  }
}

void write_model(const DetectorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << serialize_model(model) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

DetectorModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

}  // namespace deed
