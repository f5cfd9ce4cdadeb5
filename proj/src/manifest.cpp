#include "deed/manifest.hpp"

#include <fstream>

#include "deed/error.hpp"
#include "json.hpp"

namespace deed {

using Json = nlohmann::json;

void validate_fact(const FactRecord& fact) {
  const std::string name = "fact " + std::to_string(fact.fact_id);
  if (fact.label == Label::kEdited && fact.new_object.empty()) {
    throw ValidationError(name + ": edited fact without new_object");
  }
  if (fact.paraphrase_prompt.empty()) throw ValidationError(name + ": empty paraphrase_prompt");
}

std::string fact_to_json_line(const FactRecord& fact) {
  Json doc{{"fact_id", fact.fact_id},
           {"subject", fact.subject},
           {"relation", fact.relation},
           {"original_object", fact.original_object},
           {"new_object", fact.new_object},
           {"edit_prompt", fact.edit_prompt},
           {"paraphrase_prompt", fact.paraphrase_prompt},
           {"label", fact.label == Label::kEdited ? "edited" : "unedited"}};
  return doc.dump();
}

FactRecord fact_from_json_line(const std::string& line) {
  try {
    const Json doc = Json::parse(line);
    FactRecord fact;
    fact.fact_id = doc.at("fact_id").get<std::uint32_t>();
    fact.subject = doc.at("subject").get<std::string>();
    fact.relation = doc.at("relation").get<std::string>();
    fact.original_object = doc.at("original_object").get<std::string>();
    fact.new_object = doc.value("new_object", std::string{});
    fact.edit_prompt = doc.value("edit_prompt", std::string{});
    fact.paraphrase_prompt = doc.at("paraphrase_prompt").get<std::string>();
    const Json& label = doc.at("label");
    if (label.is_string()) {
      const auto text = label.get<std::string>();
      if (text == "edited") fact.label = Label::kEdited;
      else if (text == "unedited") fact.label = Label::kUnedited;
      else throw FormatError("unknown label '" + text + "'");
    } else {
      const auto value = label.get<int>();
      if (value != 0 && value != 1) throw FormatError("label must be 0 or 1");
      fact.label = static_cast<Label>(value);
    }
    validate_fact(fact);
    return fact;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad manifest line: ") + e.what());
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Manifest manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    FactRecord fact;
    try {
      fact = fact_from_json_line(line);
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const auto id = fact.fact_id;
    if (!manifest.emplace(id, std::move(fact)).second) {
      throw ValidationError("duplicate fact_id " + std::to_string(id) + " in " + path.string());
    }
  }
  return manifest;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& [id, fact] : manifest) out << fact_to_json_line(fact) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace deed
