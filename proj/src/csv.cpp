#include "edgefed/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "edgefed/error.hpp"

namespace edgefed::csv {

std::string num(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  std::string out(buf);
  if (out == "-0") return "0";
  return out;
}

std::string exact(double value) {
  if (value == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::vector<Row> read(const std::filesystem::path& path, std::string_view header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  const std::size_t columns = split(header).size();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') throw ParseError("line " + std::to_string(lineno), "CR line ending");
    if (lineno == 1) {
      if (line != header) throw ParseError("line 1", "expected header '" + std::string(header) + "'");
      continue;
    }
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != columns) {
      throw ParseError("line " + std::to_string(lineno),
                       "expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    }
    rows.push_back(Row{lineno, std::move(fields)});
  }
  if (lineno == 0) throw ParseError("line 1", "empty file");
  return rows;
}

double to_double(const std::string& field, std::size_t line, std::string_view column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line), "bad number '" + field + "' in column " + std::string(column));
  }
  return v;
}

std::uint64_t to_u64(const std::string& field, std::size_t line, std::string_view column) {
  std::uint64_t v = 0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line), "bad integer '" + field + "' in column " + std::string(column));
  }
  return v;
}

}  // namespace edgefed::csv
