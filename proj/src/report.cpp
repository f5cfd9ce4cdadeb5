#include "deed/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "deed/error.hpp"
#include "json.hpp"

namespace deed::report {

namespace {

using Json = nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += quote(fields[i]);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& columns() {
  static const std::vector<std::string> kColumns = {
      "schema_version", "experiment_kind", "feature_mode", "detector",    "truncate_k",   "seed",
      "train_model_id", "train_editor",    "train_dataset", "train_layer", "test_model_id", "test_editor",
      "test_dataset",   "test_layer",      "n_train",      "n_test",      "tp",           "fp",
      "fn",             "tn",              "precision",    "recall",      "f1",           "accuracy"};
  return kColumns;
}

std::vector<std::string> to_row(const eval::EvalReport& r) {
  const auto& m = r.metrics;
  return {std::to_string(kReportSchemaVersion),
          std::string(eval::to_string(r.experiment_kind)),
          std::string(to_string(r.feature_mode)),
          std::string(eval::to_string(r.detector)),
          r.truncate_k ? std::to_string(*r.truncate_k) : std::string(),
          std::to_string(r.seed),
          r.train_header.model_id,
          r.train_header.editor,
          r.train_header.dataset,
          std::to_string(r.train_header.layer_index),
          r.test_header.model_id,
          r.test_header.editor,
          r.test_header.dataset,
          std::to_string(r.test_header.layer_index),
          std::to_string(r.n_train),
          std::to_string(r.n_test),
          std::to_string(m.tp),
          std::to_string(m.fp),
          std::to_string(m.fn),
          std::to_string(m.tn),
          num(m.precision),
          num(m.recall),
          num(m.f1),
          num(m.accuracy)};
}

std::string csv_header() { return join_csv(columns()); }

std::string to_csv_line(const eval::EvalReport& report) { return join_csv(to_row(report)); }

std::string to_json_line(const eval::EvalReport& report) {
  const auto row = to_row(report);
  // Keys kept in column order rather than sorted.
  nlohmann::ordered_json doc;
  for (std::size_t i = 0; i < row.size(); ++i) doc[columns()[i]] = row[i];
  return doc.dump();
}

void write_csv(const std::vector<eval::EvalReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << csv_header() << '\n';
  for (const auto& r : reports) out << to_csv_line(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_jsonl(const std::vector<eval::EvalReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& r : reports) out << to_json_line(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Table table;
  table.header = columns();
  std::string line;
  if (path.extension() == ".jsonl") {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const Json doc = Json::parse(line);
        if (doc.size() != columns().size()) throw FormatError(path.string() + ": unexpected report keys");
        std::vector<std::string> row;
        for (const auto& c : columns()) row.push_back(doc.at(c).get<std::string>());
        table.rows.push_back(std::move(row));
      } catch (const Json::exception& e) {
        throw FormatError(path.string() + ": bad report line: " + e.what());
      }
    }
    return table;
  }
  if (!std::getline(in, line) || split_csv_line(line) != columns()) {
    throw FormatError(path.string() + ": report header does not match schema version " +
                      std::to_string(kReportSchemaVersion));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_csv_line(line);
    if (row.size() != columns().size()) throw FormatError(path.string() + ": row has the wrong number of fields");
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string merge_to_csv(const std::vector<std::filesystem::path>& paths) {
  std::string out = csv_header() + '\n';
  for (const auto& p : paths) {
    for (const auto& row : read_table(p).rows) out += join_csv(row) + '\n';
  }
  return out;
}

}  // namespace deed::report
