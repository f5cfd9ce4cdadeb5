#include "deed/feature_store.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include "deed/error.hpp"
#include "json.hpp"

namespace deed {

namespace {

using Json = nlohmann::json;

constexpr std::string_view kMagic = "DEED1";
constexpr double kPdSumTolerance = 1e-6;

static_assert(std::endian::native == std::endian::little,
              "feature files are little-endian; add byte swapping for this target");

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

std::string record_name(const FeatureRecord& record) {
  return "record fact_id=" + std::to_string(record.fact_id);
}

std::uint64_t record_stride(const FeatureSetHeader& header) {
  return 4 + 1 + 4 * (static_cast<std::uint64_t>(header.hs_dim) + header.pd_k);
}

void validate_header(const FeatureSetHeader& header) {
  if (header.format_version != kFormatVersion) {
    throw ValidationError("unsupported format_version " + std::to_string(header.format_version));
  }
  if (header.hs_dim == 0) throw ValidationError("hs_dim must be positive");
  if (header.pd_k == 0) throw ValidationError("pd_k must be positive");
  if (header.token_position != "last") {
    throw ValidationError("token_position must be \"last\"");
  }
}

Json header_to_json(const FeatureSetHeader& header) {
  // nlohmann::json objects are key-sorted, which keeps the encoding canonical.
  return Json{{"version", header.format_version},
              {"model_id", header.model_id},
              {"editor", header.editor},
              {"dataset", header.dataset},
              {"layer_index", header.layer_index},
              {"token_position", header.token_position},
              {"hs_dim", header.hs_dim},
              {"pd_k", header.pd_k},
              {"record_count", header.record_count}};
}

FeatureSetHeader header_from_json(const Json& doc) {
  static const std::set<std::string> kKeys = {"version",     "model_id",       "editor",
                                              "dataset",     "layer_index",    "token_position",
                                              "hs_dim",      "pd_k",           "record_count"};
  if (!doc.is_object()) throw FormatError("header is not a JSON object");
  std::set<std::string> keys;
  for (const auto& item : doc.items()) keys.insert(item.key());
  if (keys != kKeys) throw FormatError("header keys do not match the format");

  auto integer = [&](const char* key) -> const Json& {
    const Json& v = doc.at(key);
    if (!v.is_number_integer()) throw FormatError(std::string("header field ") + key + " is not an integer");
    return v;
  };
  auto text = [&](const char* key) -> std::string {
    const Json& v = doc.at(key);
    if (!v.is_string()) throw FormatError(std::string("header field ") + key + " is not a string");
    return v.get<std::string>();
  };
  auto unsigned_field = [&](const char* key, std::uint64_t max) -> std::uint64_t {
    const Json& v = integer(key);
    if (v.is_number_unsigned()) {
      const auto value = v.get<std::uint64_t>();
      if (value <= max) return value;
    } else if (v.get<std::int64_t>() >= 0) {
      const auto value = static_cast<std::uint64_t>(v.get<std::int64_t>());
      if (value <= max) return value;
    }
    throw FormatError(std::string("header field ") + key + " out of range");
  };

  FeatureSetHeader header;
  const std::int64_t version = integer("version").get<std::int64_t>();
  if (version != kFormatVersion) throw FormatError("unsupported version " + std::to_string(version));
  header.format_version = kFormatVersion;
  header.model_id = text("model_id");
  header.editor = text("editor");
  header.dataset = text("dataset");
  const std::int64_t layer = integer("layer_index").get<std::int64_t>();
  if (layer < -1 || layer > std::numeric_limits<int>::max()) throw FormatError("layer_index out of range");
  header.layer_index = static_cast<int>(layer);
  header.token_position = text("token_position");
  header.hs_dim = static_cast<std::uint32_t>(unsigned_field("hs_dim", UINT32_MAX));
  header.pd_k = static_cast<std::uint32_t>(unsigned_field("pd_k", UINT32_MAX));
  header.record_count = unsigned_field("record_count", std::numeric_limits<std::int64_t>::max());
  return header;
}

}  // namespace

std::size_t FeatureSet::count(Label label) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const FeatureRecord& r) { return r.label == label; }));
}

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kHs: return "HS";
    case FeatureMode::kPd: return "PD";
    case FeatureMode::kHsPd: return "HS_PD";
  }
  return "?";
}

FeatureMode parse_feature_mode(std::string_view text) {
  std::string upper;
  for (char c : text) upper.push_back(c == '+' || c == '-' ? '_' : static_cast<char>(std::toupper(c)));
  if (upper == "HS") return FeatureMode::kHs;
  if (upper == "PD") return FeatureMode::kPd;
  if (upper == "HS_PD") return FeatureMode::kHsPd;
  throw ParameterError("unknown feature mode '" + std::string(text) + "'");
}

void validate_record(const FeatureRecord& record, const FeatureSetHeader& header) {
  if (record.label != Label::kEdited && record.label != Label::kUnedited) {
    throw ValidationError(record_name(record) + ": label must be 0 or 1");
  }
  if (record.hs.size() != header.hs_dim) {
    throw ValidationError(record_name(record) + ": hs length " + std::to_string(record.hs.size()) +
                          " != hs_dim " + std::to_string(header.hs_dim));
  }
  if (record.pd.size() != header.pd_k) {
    throw ValidationError(record_name(record) + ": pd length " + std::to_string(record.pd.size()) +
                          " != pd_k " + std::to_string(header.pd_k));
  }
  for (float v : record.hs) {
    if (!std::isfinite(v)) throw ValidationError(record_name(record) + ": hs not finite");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < record.pd.size(); ++i) {
    const float v = record.pd[i];
    if (!(v >= 0.0f && v <= 1.0f)) throw ValidationError(record_name(record) + ": pd value outside [0,1]");
    if (i > 0 && v > record.pd[i - 1]) throw ValidationError(record_name(record) + ": pd not sorted");
    sum += v;
  }
  if (sum > 1.0 + kPdSumTolerance) throw ValidationError(record_name(record) + ": pd sums above 1");
}

void validate(const FeatureSet& set) {
  validate_header(set.header);
  if (set.header.record_count != set.records.size()) {
    throw ValidationError("record_count " + std::to_string(set.header.record_count) + " but " +
                          std::to_string(set.records.size()) + " records present");
  }
  for (const auto& record : set.records) validate_record(record, set.header);
}

FeatureSet with_records(const FeatureSet& set, std::vector<FeatureRecord> records) {
  FeatureSet out{set.header, std::move(records)};
  out.header.record_count = out.records.size();
  return out;
}

std::string encode_feature_set(const FeatureSet& set) {
  validate(set);
  const std::string header = header_to_json(set.header).dump();
  std::string out;
  out.reserve(kMagic.size() + 4 + header.size() + set.records.size() * record_stride(set.header));
  out.append(kMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out.append(header);
  for (const auto& record : set.records) {
    put<std::uint32_t>(out, record.fact_id);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(record.label));
    for (float v : record.hs) put<float>(out, v);
    for (float v : record.pd) put<float>(out, v);
  }
  return out;
}

FeatureSet decode_feature_set(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("bad magic: not a .deed feature file");
  }
  std::size_t offset = kMagic.size();
  if (bytes.size() < offset + 4) throw CorruptionError("truncated header length");
  const auto header_len = get<std::uint32_t>(bytes, offset);
  offset += 4;
  if (bytes.size() - offset < header_len) throw CorruptionError("truncated header");

  Json doc;
  try {
    doc = Json::parse(bytes.substr(offset, header_len));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("header is not valid JSON: ") + e.what());
  }
  FeatureSet set;
  set.header = header_from_json(doc);
  try {
    validate_header(set.header);
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  offset += header_len;

  const std::uint64_t stride = record_stride(set.header);
  const std::uint64_t payload = bytes.size() - offset;
  if (set.header.record_count > payload / stride) {
    throw CorruptionError("truncated payload: header declares " + std::to_string(set.header.record_count) +
                          " records, file holds " + std::to_string(payload / stride));
  }
  if (payload != set.header.record_count * stride) {
    throw CorruptionError("payload length " + std::to_string(payload) + " is not record_count x stride");
  }

  set.records.resize(set.header.record_count);
  for (auto& record : set.records) {
    record.fact_id = get<std::uint32_t>(bytes, offset);
    const auto label = get<std::uint8_t>(bytes, offset + 4);
    if (label > 1) throw ValidationError(record_name(record) + ": label byte " + std::to_string(label));
    record.label = static_cast<Label>(label);
    offset += 5;
    record.hs.resize(set.header.hs_dim);
    std::memcpy(record.hs.data(), bytes.data() + offset, 4 * record.hs.size());
    offset += 4 * record.hs.size();
    record.pd.resize(set.header.pd_k);
    std::memcpy(record.pd.data(), bytes.data() + offset, 4 * record.pd.size());
    offset += 4 * record.pd.size();
    validate_record(record, set.header);
  }
  return set;
}

void write_feature_file(const FeatureSet& set, const std::filesystem::path& path) {
  const std::string bytes = encode_feature_set(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureSet read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return decode_feature_set(bytes);
}

std::size_t feature_width(const FeatureSetHeader& header, FeatureMode mode,
                          std::optional<std::uint32_t> truncate_k) {
  if (truncate_k) {
    if (*truncate_k == 0) throw ParameterError("truncate_k must be positive");
    if (*truncate_k > header.pd_k) {
      throw ParameterError("truncate_k " + std::to_string(*truncate_k) + " exceeds pd_k " +
                           std::to_string(header.pd_k));
    }
  }
  const std::size_t pd_width = truncate_k.value_or(header.pd_k);
  switch (mode) {
    case FeatureMode::kHs: return header.hs_dim;
    case FeatureMode::kPd: return pd_width;
    case FeatureMode::kHsPd: return header.hs_dim + pd_width;
  }
  return 0;
}

AssembledData assemble_vectors(const FeatureSet& set, FeatureMode mode,
                               std::optional<std::uint32_t> truncate_k) {
  const std::size_t width = feature_width(set.header, mode, truncate_k);
  const std::size_t pd_width = truncate_k.value_or(set.header.pd_k);
  const bool use_hs = mode != FeatureMode::kPd;
  const bool use_pd = mode != FeatureMode::kHs;

  AssembledData data{Matrix(set.records.size(), width), Labels(set.records.size())};
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& record = set.records[i];
    auto row = data.x.row(i);
    std::size_t c = 0;
    if (use_hs) {
      for (float v : record.hs) row[c++] = v;
    }
    if (use_pd) {
      for (std::size_t j = 0; j < pd_width; ++j) row[c++] = record.pd[j];
    }
    data.y[i] = to_sign(record.label);
  }
  return data;
}

}  // namespace deed
