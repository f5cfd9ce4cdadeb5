#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deed/matrix.hpp"

namespace deed {

enum class Label : std::uint8_t { kUnedited = 0, kEdited = 1 };

/// +1 for edited, -1 for unedited.
inline int to_sign(Label label) { return label == Label::kEdited ? 1 : -1; }

/// Features of one fact, measured on its paraphrase prompt.
struct FeatureRecord {
  std::uint32_t fact_id = 0;
  Label label = Label::kUnedited;
  /// Hidden state at the last prompt token of the chosen layer.
  std::vector<float> hs;
  /// Top-k next-token probabilities, sorted non-increasing.
  std::vector<float> pd;

  bool operator==(const FeatureRecord&) const = default;
};

inline constexpr int kFormatVersion = 1;

struct FeatureSetHeader {
  int format_version = kFormatVersion;
  std::string model_id;
  std::string editor;
  std::string dataset;
  /// -1 denotes the last layer.
  int layer_index = -1;
  std::string token_position = "last";
  std::uint32_t hs_dim = 0;
  std::uint32_t pd_k = 0;
  std::uint64_t record_count = 0;

  bool operator==(const FeatureSetHeader&) const = default;
};

struct FeatureSet {
  FeatureSetHeader header;
  std::vector<FeatureRecord> records;

  bool operator==(const FeatureSet&) const = default;

  std::size_t size() const { return records.size(); }
  std::size_t count(Label label) const;
};

enum class FeatureMode { kHs, kPd, kHsPd };

std::string_view to_string(FeatureMode mode);
/// Accepts "HS", "PD", "HS_PD" (case-insensitive, '+' also accepted as separator).
FeatureMode parse_feature_mode(std::string_view text);

/// Checks one record against the header dimensions and value invariants.
/// Throws ValidationError naming the record.
void validate_record(const FeatureRecord& record, const FeatureSetHeader& header);

/// Checks the header and every record, including record_count.
void validate(const FeatureSet& set);

/// Returns a copy of `set` holding only `records`, with record_count updated.
FeatureSet with_records(const FeatureSet& set, std::vector<FeatureRecord> records);

/// Encodes to the .deed byte layout. Pure: identical sets give identical bytes.
std::string encode_feature_set(const FeatureSet& set);
FeatureSet decode_feature_set(std::string_view bytes);

void write_feature_file(const FeatureSet& set, const std::filesystem::path& path);
FeatureSet read_feature_file(const std::filesystem::path& path);

struct AssembledData {
  Matrix x;
  Labels y;
};

/// Builds the classifier input matrix for `mode`. PD columns are the first
/// `truncate_k` entries when given (no renormalisation).
AssembledData assemble_vectors(const FeatureSet& set, FeatureMode mode,
                               std::optional<std::uint32_t> truncate_k = std::nullopt);

/// Column count assemble_vectors would produce.
std::size_t feature_width(const FeatureSetHeader& header, FeatureMode mode,
                          std::optional<std::uint32_t> truncate_k);

}  // namespace deed
