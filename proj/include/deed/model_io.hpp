#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "deed/adaboost.hpp"
#include "deed/linear_l1.hpp"

namespace deed {

using DetectorModel = std::variant<AdaBoostModel, LinearL1Model>;

inline constexpr int kModelFormatVersion = 1;

Labels predict(const DetectorModel& model, const Matrix& x);
const ModelInputs& model_inputs(const DetectorModel& model);

/// JSON document with format, version, type, learners or weights, feature
/// mode, standardisation and training provenance. Doubles are written with
/// round-trip precision, so a decoded model predicts identically.
std::string serialize_model(const DetectorModel& model);
/// Throws FormatError on unknown version or type, or malformed content.
DetectorModel deserialize_model(std::string_view document);

/// Decodes one learner entry such as {"feature":0,"threshold":2.5,"polarity":1,"alpha":11.51}.
WeakLearner learner_from_json(std::string_view document);

void write_model(const DetectorModel& model, const std::filesystem::path& path);
DetectorModel read_model(const std::filesystem::path& path);

}  // namespace deed
