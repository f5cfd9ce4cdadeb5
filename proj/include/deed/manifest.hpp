#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "deed/feature_store.hpp"

namespace deed {

/// One knowledge triplet plus the prompts used to probe it.
struct FactRecord {
  std::uint32_t fact_id = 0;
  std::string subject;
  std::string relation;
  std::string original_object;
  /// Empty for unedited facts.
  std::string new_object;
  std::string edit_prompt;
  /// Every detection feature is computed on this prompt.
  std::string paraphrase_prompt;
  Label label = Label::kUnedited;

  /// The object a probe of this fact should retrieve after editing.
  const std::string& target_object() const {
    return label == Label::kEdited ? new_object : original_object;
  }

  bool operator==(const FactRecord&) const = default;
};

/// Facts keyed by fact_id.
using Manifest = std::map<std::uint32_t, FactRecord>;

void validate_fact(const FactRecord& fact);

/// Reads a JSON Lines manifest. Blank lines are skipped; duplicate ids are
/// a ValidationError.
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

std::string fact_to_json_line(const FactRecord& fact);
FactRecord fact_from_json_line(const std::string& line);

}  // namespace deed
