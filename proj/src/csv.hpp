#pragma once

// Minimal comma-delimited table reading shared by the dataset and sample
// readers. Not part of the public API.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rankrate::detail {

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the file
  std::vector<std::string> fields;
};

struct CsvTable {
  std::filesystem::path path;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  // Column index for a header name; throws DataError when absent.
  std::size_t column(std::string_view name) const;
};

// Skips blank lines and lines starting with '#'. Fields are trimmed. Every
// row must have as many fields as the header.
CsvTable read_csv(const std::filesystem::path& path);

// Throws DataError mentioning file:line when parsing fails.
long long parse_int(const CsvTable& table, const CsvRow& row, std::size_t col);
double parse_double(const CsvTable& table, const CsvRow& row, std::size_t col);

std::string format_double(double x);

}  // namespace rankrate::detail
