#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "deed/eval.hpp"

namespace deed::report {

/// Bumped whenever the column set changes.
inline constexpr int kReportSchemaVersion = 1;

/// Fixed column order shared by CSV and JSON Lines output.
const std::vector<std::string>& columns();

/// One report as column -> text value, in columns() order.
std::vector<std::string> to_row(const eval::EvalReport& report);

std::string csv_header();
std::string to_csv_line(const eval::EvalReport& report);
std::string to_json_line(const eval::EvalReport& report);

/// Writes header + rows.
void write_csv(const std::vector<eval::EvalReport>& reports, const std::filesystem::path& path);
void write_jsonl(const std::vector<eval::EvalReport>& reports, const std::filesystem::path& path);

/// A loaded report table: header row plus data rows, all text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a report file (.csv or .jsonl, by extension). Throws FormatError on
/// a column set that differs from columns().
Table read_table(const std::filesystem::path& path);

/// Concatenates report files, in argument order, into one CSV table.
std::string merge_to_csv(const std::vector<std::filesystem::path>& paths);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace deed::report
