#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace edgefed::csv {

/// Number with 6 significant digits, '.' decimal, no negative zero.
std::string num(double value);

/// Shortest-safe round-trip form (17 significant digits).
std::string exact(double value);

std::vector<std::string> split(std::string_view line);

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Reads a comma-separated file whose first line must equal `header`.
/// Blank trailing lines are ignored; a CR before LF is rejected.
std::vector<Row> read(const std::filesystem::path& path, std::string_view header);

double to_double(const std::string& field, std::size_t line, std::string_view column);
std::uint64_t to_u64(const std::string& field, std::size_t line, std::string_view column);

}  // namespace edgefed::csv
