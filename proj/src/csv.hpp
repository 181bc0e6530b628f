#pragma once

// Minimal comma-separated reader shared by the training and test-drive logs.
// Fields are never quoted in these formats, so a plain split suffices.

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pedmap/error.hpp"

namespace pedmap::csv {

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* name) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError(line, std::string("invalid ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

/// Calls `on_row(fields, line_number)` for each non-blank data row after
/// checking the header matches `header` exactly (a trailing CR is ignored).
template <typename OnRow>
void read(std::istream& in, std::string_view header, OnRow&& on_row) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next()) throw ParseError(1, "missing header");
  if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != header) {
    throw ParseError(1, "unexpected header '" + line + "', expected '" + std::string(header) + "'");
  }
  const std::size_t columns = split(header).size();
  while (next()) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    on_row(fields, line_no);
  }
}

}  // namespace pedmap::csv
