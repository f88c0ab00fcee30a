#include "csv.hpp"
#include "rankrate/format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "rankrate/error.hpp"

namespace rankrate::detail {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(const CsvTable& table, const CsvRow& row) {
  return table.path.string() + ":" + std::to_string(row.line);
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError(path.string() + ": missing column '" + std::string(name) + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  CsvTable table;
  table.path = path;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    const auto body = trim(view);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split(body);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back({line_no, std::move(fields)});
  }
  if (!have_header) throw DataError(path.string() + ": missing header line");
  return table;
}

long long parse_int(const CsvTable& table, const CsvRow& row, std::size_t col) {
  const std::string& s = row.fields.at(col);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(where(table, row) + ": expected an integer in column '" + table.header[col] +
                    "', found '" + s + "'");
  }
  return value;
}

double parse_double(const CsvTable& table, const CsvRow& row, std::size_t col) {
  const std::string& s = row.fields.at(col);
  if (s == "NA" || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(where(table, row) + ": expected a number in column '" + table.header[col] +
                    "', found '" + s + "'");
  }
  return value;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace rankrate::detail

namespace rankrate {

std::string format_double(double x) { return detail::format_double(x); }

}  // namespace rankrate
